//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motifdiff/molgraph.hpp"
#include "motifdiff/npe.hpp"

namespace motifdiff {

struct DirectedEdge {
  int source;
  int target;
  BondOrder bond_order;
  // Atom index within the source motif's canonical atom order.
  int attachment;

  friend bool operator==(const DirectedEdge &, const DirectedEdge &) = default;
};

// Motif-level graph: one node per motif instance, two directed edges per
// inter-motif bond.
class MotifGraph {
public:
  std::vector<int> nodes;
  std::vector<DirectedEdge> edges;

  int num_nodes() const { return static_cast<int>(nodes.size()); }

  friend bool operator==(const MotifGraph &, const MotifGraph &) = default;
};

// Throws Error(kDisconnectedInput), Error(kUnknownAtomVariant) for atoms whose
// charge/hydrogen decoration is not in the vocabulary, and
// Error(kAmbiguousEncoding) if two motifs end up joined by more than one bond.
MotifGraph encode(const MolecularGraph &g, const MotifVocabulary &v);

// Throws Error(kUnknownMotifId), Error(kDanglingAttachment),
// Error(kMissingReverseEdge).
MolecularGraph decode(const MotifGraph &h, const MotifVocabulary &v);

// Encodes every molecule; `threads` > 1 uses OpenMP. Output order matches the
// input order.
std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v, int threads = 1);

// --- dense graph-token features ---

inline constexpr int kNumBondTypes = 4;  // null, single, double, triple

inline int bond_category(BondOrder order) {
  return static_cast<int>(order);
}

struct FeatureLayout {
  int f_motif = 0;
  int f_bond = kNumBondTypes;
  int f_attach = 0;
  int n_max = 0;

  int width() const { return f_motif + n_max * f_bond + n_max * f_attach; }
  int bond_offset(int j) const { return f_motif + j * f_bond; }
  int attach_offset(int j) const {
    return f_motif + n_max * f_bond + j * f_attach;
  }

  static FeatureLayout for_vocabulary(const MotifVocabulary &v, int n_max);
};

// Compact categorical view of a graph-token matrix.
struct TokenState {
  int n = 0;
  std::vector<int> motif;   // n
  std::vector<int> bond;    // n * n, category 0..3, symmetric, zero diagonal
  std::vector<int> attach;  // n * n, -1 where the bond is null

  int bond_at(int i, int j) const { return bond[i * n + j]; }
  int attach_at(int i, int j) const { return attach[i * n + j]; }

  friend bool operator==(const TokenState &, const TokenState &) = default;
};

// Rows are graph tokens; width = layout.width().
struct GraphTokenMatrix {
  FeatureLayout layout;
  Eigen::MatrixXd rows;

  int n() const { return static_cast<int>(rows.rows()); }
};

TokenState to_token_state(const MotifGraph &h);
MotifGraph from_token_state(const TokenState &s);

GraphTokenMatrix to_matrix(const TokenState &s, const FeatureLayout &layout);
// Throws Error(kInvalidOneHot) / Error(kInconsistentBondBlocks). Noisy
// states may leave the attachment block of a real bond empty when
// allow_missing_attachments is set; the attachment then reads as -1.
TokenState from_matrix(const GraphTokenMatrix &m,
                       bool allow_missing_attachments = false);

// Throws Error(kLayoutOverflow) if the graph does not fit the layout.
GraphTokenMatrix featurize(const MotifGraph &h, const FeatureLayout &layout);
MotifGraph defeaturize(const GraphTokenMatrix &m, const FeatureLayout &layout);

// Line-oriented encoded-corpus format:
//   # motifdiff-encoded v1
//   <index>\t<motif ids, comma separated>\t<edges "s>t:order@att", ';'>
void write_encoded(const std::vector<MotifGraph> &encoded, std::ostream &os);
std::vector<MotifGraph> read_encoded(std::istream &is);

}  // namespace motifdiff
