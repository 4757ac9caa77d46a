//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/kernels.hpp"

#include <unordered_map>

#include "motifdiff/error.hpp"

#include "motifdiff/parallel.hpp"
#include "segmentation.hpp"

namespace motifdiff {

namespace {

// Candidate keys left after replaying the vocabulary on one molecule, as
// PairCache key ids with their counts.
void molecule_candidates(const MolecularGraph &g, const MotifVocabulary &v,
                         std::unordered_map<int, long> &out) {
  if (g.empty())
    return;
  detail::Segmentation seg(g, v);
  detail::replay(seg, v);
  std::vector<detail::Occurrence> occs;
  seg.occurrences(v.cache(), occs);
  for (const detail::Occurrence &o: occs)
    ++out[o.key];
}

std::map<CanonicalString, long>
resolve(const std::unordered_map<int, long> &counts, const MotifVocabulary &v) {
  std::map<CanonicalString, long> out;
  for (const auto &[key, count]: counts)
    out[v.cache().key(key)] += count;
  return out;
}

}  // namespace

std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v, int threads) {
  if (threads <= 1)
    return kernels::serial::candidate_counts(corpus, v);
  return kernels::parallel::candidate_counts(corpus, v, threads);
}

namespace kernels::serial {

std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v) {
  std::vector<MotifGraph> out;
  out.reserve(corpus.size());
  for (const MolecularGraph &g: corpus)
    out.push_back(encode(g, v));
  return out;
}

std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v) {
  std::unordered_map<int, long> counts;
  for (const MolecularGraph &g: corpus)
    molecule_candidates(g, v, counts);
  return resolve(counts, v);
}

Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps) {
  const auto n = static_cast<Eigen::Index>(fps.size());
  Eigen::MatrixXd sim(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sim(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      sim(i, j) = sim(j, i) = tanimoto(fps[i], fps[j]);
  }
  return sim;
}

std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups) {
  std::vector<double> out;
  out.reserve(cands.size());
  for (const Fingerprint &c: cands)
    out.push_back(consistency_score(c, groups));
  return out;
}

}  // namespace kernels::serial

namespace kernels::parallel {

std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v, int threads) {
  std::vector<MotifGraph> out(corpus.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(corpus.size()), threads,
                       [&](std::ptrdiff_t i) { out[i] = encode(corpus[i], v); });
  return out;
}

std::map<CanonicalString, long>
candidate_counts(const std::vector<MolecularGraph> &corpus,
                 const MotifVocabulary &v, int threads) {
  std::vector<std::unordered_map<int, long>> per_mol(corpus.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(corpus.size()), threads,
                       [&](std::ptrdiff_t i) {
                         molecule_candidates(corpus[i], v, per_mol[i]);
                       });
  std::unordered_map<int, long> counts;
  for (const auto &m: per_mol)
    for (const auto &[key, count]: m)
      counts[key] += count;
  return resolve(counts, v);
}

Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps,
                                  int threads) {
  const auto n = static_cast<Eigen::Index>(fps.size());
  Eigen::MatrixXd sim(n, n);
  for (const Fingerprint &f: fps)
    if (f.width != fps.front().width)
      throw Error(ErrorKind::kWidthMismatch, "mixed fingerprint widths");
#pragma omp parallel for num_threads(threads) schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    sim(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      sim(i, j) = sim(j, i) = tanimoto(fps[i], fps[j]);
  }
  return sim;
}

std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups,
                                       int threads) {
  std::vector<double> out(cands.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(cands.size()), threads,
                       [&](std::ptrdiff_t i) {
                         out[i] = consistency_score(cands[i], groups);
                       });
  return out;
}

}  // namespace kernels::parallel

}  // namespace motifdiff
