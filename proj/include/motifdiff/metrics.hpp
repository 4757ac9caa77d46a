//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motifdiff/context.hpp"
#include "motifdiff/molgraph.hpp"

namespace motifdiff {

struct FingerprintParams {
  int radius = 2;
  int width = 2048;
};

struct Fingerprint {
  std::vector<std::uint64_t> words;
  int width = 0;
  int radius = 0;

  bool test(int bit) const { return (words[bit >> 6] >> (bit & 63)) & 1U; }
  int popcount() const;
};

// Circular hashed fingerprint. Atom invariants: element, charge, degree,
// total hydrogens, ring membership; each iteration folds in the sorted
// (bond order, neighbor identifier) list.
Fingerprint fingerprint(const MolecularGraph &g,
                        const FingerprintParams &params = {});

// |a & b| / |a | b|, 1 when both are empty. Throws Error(kWidthMismatch).
double tanimoto(const Fingerprint &a, const Fingerprint &b);

// Symmetric n x n matrix with unit diagonal; threads > 1 uses OpenMP.
Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps,
                                  int threads = 1);

struct GroupFingerprints {
  std::vector<Fingerprint> positive, medium, negative;
};

GroupFingerprints group_fingerprints(const DemoGroups &groups,
                                     const FingerprintParams &params = {});

// Clamped mean of the three pairwise margins between group similarities.
double consistency_from_similarities(double sim_pos, double sim_med,
                                     double sim_neg);

// Mean candidate-to-member Tanimoto per group; empty groups count as 0.
// Throws Error(kAllGroupsEmpty).
double consistency_score(const Fingerprint &candidate,
                         const GroupFingerprints &groups);
double consistency_score(const MolecularGraph &candidate,
                         const DemoGroups &groups,
                         const FingerprintParams &params = {});

std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups,
                                       int threads = 1);

// Indices of the `keep` best candidates, best first; ties by canonical key.
// Throws Error(kInsufficientCandidates) when keep exceeds the input size.
std::vector<int> filter_by_consistency(
    const std::vector<MolecularGraph> &candidates, const DemoGroups &groups,
    int keep, const FingerprintParams &params = {}, int threads = 1,
    std::vector<double> *scores = nullptr);

enum class IntDivNorm {
  kSquared,  // 1/|G|^2 over ordered pairs m1 != m2
  kPairs,    // 1/(|G|(|G|-1))
};

// Throws Error(kTooFewMolecules).
double int_div(const std::vector<MolecularGraph> &set,
               const FingerprintParams &params = {},
               IntDivNorm norm = IntDivNorm::kSquared, int threads = 1);
double int_div_from_similarity(const Eigen::MatrixXd &sim,
                               IntDivNorm norm = IntDivNorm::kSquared);

struct GenerationEval {
  double top1 = 0;
  double top_k_mean = 0;
  double diversity = 0;
  double harmonic = 0;
};

struct ScoredMolecule {
  MolecularGraph molecule;
  double score;
};

// Top-k by score (ties by canonical key). Throws
// Error(kInsufficientCandidates).
GenerationEval evaluate_generation(const std::vector<ScoredMolecule> &scored,
                                   int k = 10,
                                   const FingerprintParams &params = {},
                                   IntDivNorm norm = IntDivNorm::kSquared);

double harmonic_mean(double a, double b);

struct EvalRow {
  std::string task_id;
  std::string category;
  GenerationEval eval;
};

// Per-task rows then per-category means, tab separated.
void write_eval_report(const std::vector<EvalRow> &rows, std::ostream &os);

}  // namespace motifdiff
