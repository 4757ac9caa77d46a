//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/error.hpp"

namespace motifdiff {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::kParseError:
    return "ParseError";
  case ErrorKind::kUnsupportedFeature:
    return "UnsupportedFeature";
  case ErrorKind::kKekulizationError:
    return "KekulizationError";
  case ErrorKind::kCorpusEmpty:
    return "CorpusEmpty";
  case ErrorKind::kDisconnectedInput:
    return "DisconnectedInput";
  case ErrorKind::kAmbiguousEncoding:
    return "AmbiguousEncoding";
  case ErrorKind::kUnknownAtomVariant:
    return "UnknownAtomVariant";
  case ErrorKind::kDanglingAttachment:
    return "DanglingAttachment";
  case ErrorKind::kMissingReverseEdge:
    return "MissingReverseEdge";
  case ErrorKind::kUnknownMotifId:
    return "UnknownMotifId";
  case ErrorKind::kLayoutOverflow:
    return "LayoutOverflow";
  case ErrorKind::kInconsistentBondBlocks:
    return "InconsistentBondBlocks";
  case ErrorKind::kInvalidOneHot:
    return "InvalidOneHot";
  case ErrorKind::kOutOfRangeStep:
    return "OutOfRangeStep";
  case ErrorKind::kScheduleDegeneracy:
    return "ScheduleDegeneracy";
  case ErrorKind::kZeroMassPosterior:
    return "ZeroMassPosterior";
  case ErrorKind::kDenoiserContractViolation:
    return "DenoiserContractViolation";
  case ErrorKind::kNonDecodableFinalState:
    return "NonDecodableFinalState";
  case ErrorKind::kShapeMismatch:
    return "ShapeMismatch";
  case ErrorKind::kNonDistributionInput:
    return "NonDistributionInput";
  case ErrorKind::kDegenerateRange:
    return "DegenerateRange";
  case ErrorKind::kBudgetExceededByTarget:
    return "BudgetExceededByTarget";
  case ErrorKind::kWidthMismatch:
    return "WidthMismatch";
  case ErrorKind::kAllGroupsEmpty:
    return "AllGroupsEmpty";
  case ErrorKind::kTooFewMolecules:
    return "TooFewMolecules";
  case ErrorKind::kInsufficientCandidates:
    return "InsufficientCandidates";
  case ErrorKind::kInvalidArgument:
    return "InvalidArgument";
  case ErrorKind::kFormatError:
    return "FormatError";
  }
  return "Unknown";
}

}  // namespace motifdiff
