//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Hot loops in two forms: a plain serial reference and an OpenMP version.
// Both produce identical results; the public entry points (encode_all,
// pairwise_tanimoto, consistency_scores, candidate_counts) pick one by
// thread count.

#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "motifdiff/metrics.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/tokenizer.hpp"

namespace motifdiff {

// Frequencies of every merge candidate left in the corpus after encoding
// with `v`, keyed by the merged fragment's canonical key.
std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v, int threads = 1);

namespace kernels::serial {
std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v);
std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v);
Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps);
std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups);
}  // namespace kernels::serial

namespace kernels::parallel {
std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v, int threads);
std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v, int threads);
Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps,
                                  int threads);
std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups,
                                       int threads);
}  // namespace kernels::parallel

}  // namespace motifdiff
