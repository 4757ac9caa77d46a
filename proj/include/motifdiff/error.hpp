//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace motifdiff {

enum class ErrorKind {
  kParseError,
  kUnsupportedFeature,
  kKekulizationError,
  kCorpusEmpty,
  kDisconnectedInput,
  kAmbiguousEncoding,
  kUnknownAtomVariant,
  kDanglingAttachment,
  kMissingReverseEdge,
  kUnknownMotifId,
  kLayoutOverflow,
  kInconsistentBondBlocks,
  kInvalidOneHot,
  kOutOfRangeStep,
  kScheduleDegeneracy,
  kZeroMassPosterior,
  kDenoiserContractViolation,
  kNonDecodableFinalState,
  kShapeMismatch,
  kNonDistributionInput,
  kDegenerateRange,
  kBudgetExceededByTarget,
  kWidthMismatch,
  kAllGroupsEmpty,
  kTooFewMolecules,
  kInsufficientCandidates,
  kInvalidArgument,
  kFormatError,
};

std::string_view error_kind_name(ErrorKind kind);

// All recoverable failures in the library are reported with this type; the
// kind identifies which documented error condition occurred.
class Error: public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) { }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ParseError: public Error {
public:
  ParseError(std::size_t offset, const std::string &what)
      : Error(ErrorKind::kParseError,
              "at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) { }

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace motifdiff
