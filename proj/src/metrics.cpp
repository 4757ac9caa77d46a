//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include "motifdiff/error.hpp"
#include "motifdiff/kernels.hpp"
#include "motifdiff/rng.hpp"
#include "motifdiff/parallel.hpp"

namespace motifdiff {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t s = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

double mean_similarity(const Fingerprint &c,
                       const std::vector<Fingerprint> &group) {
  if (group.empty())
    return 0.0;
  double sum = 0;
  for (const Fingerprint &f: group)
    sum += tanimoto(c, f);
  return sum / static_cast<double>(group.size());
}

}  // namespace

int Fingerprint::popcount() const {
  int n = 0;
  for (std::uint64_t w: words)
    n += std::popcount(w);
  return n;
}

Fingerprint fingerprint(const MolecularGraph &g,
                        const FingerprintParams &params) {
  if (params.width <= 0 || params.radius < 0)
    throw Error(ErrorKind::kInvalidArgument,
                "fingerprint width must be positive and radius non-negative");
  Fingerprint fp;
  fp.width = params.width;
  fp.radius = params.radius;
  fp.words.assign((params.width + 63) / 64, 0);

  const int n = g.num_atoms();
  std::vector<bool> ring_bond = cycle_bonds(g);
  std::vector<std::uint64_t> ids(n);
  for (int i = 0; i < n; ++i) {
    const AtomNode &a = g.atom(i);
    bool in_ring = false;
    for (const Neighbor &nb: g.neighbors(i))
      in_ring = in_ring || ring_bond[nb.bond];
    std::uint64_t h = 0x5bd1e995ULL;
    h = mix(h, static_cast<std::uint64_t>(a.element));
    h = mix(h, static_cast<std::uint64_t>(a.formal_charge + 128));
    h = mix(h, static_cast<std::uint64_t>(g.degree(i)));
    h = mix(h, static_cast<std::uint64_t>(total_hydrogens(g, i)));
    h = mix(h, in_ring ? 1 : 0);
    ids[i] = h;
  }
  auto set_bits = [&] {
    for (std::uint64_t id: ids) {
      auto bit = static_cast<int>(id % static_cast<std::uint64_t>(fp.width));
      fp.words[bit >> 6] |= std::uint64_t{ 1 } << (bit & 63);
    }
  };
  set_bits();

  std::vector<std::pair<int, std::uint64_t>> env;
  for (int r = 1; r <= params.radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const Neighbor &nb: g.neighbors(i))
        env.emplace_back(static_cast<int>(g.bond(nb.bond).order), ids[nb.atom]);
      std::sort(env.begin(), env.end());
      std::uint64_t h = mix(static_cast<std::uint64_t>(r), ids[i]);
      for (const auto &[order, id]: env)
        h = mix(mix(h, static_cast<std::uint64_t>(order)), id);
      next[i] = h;
    }
    ids.swap(next);
    set_bits();
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.width != b.width)
    throw Error(ErrorKind::kWidthMismatch,
                "fingerprint widths " + std::to_string(a.width) + " and " +
                    std::to_string(b.width));
  int both = 0, either = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    both += std::popcount(a.words[i] & b.words[i]);
    either += std::popcount(a.words[i] | b.words[i]);
  }
  if (either == 0)
    return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

Eigen::MatrixXd pairwise_tanimoto(const std::vector<Fingerprint> &fps,
                                  int threads) {
  for (const Fingerprint &f: fps)
    if (f.width != fps.front().width)
      throw Error(ErrorKind::kWidthMismatch, "mixed fingerprint widths");
  if (threads <= 1)
    return kernels::serial::pairwise_tanimoto(fps);
  return kernels::parallel::pairwise_tanimoto(fps, threads);
}

GroupFingerprints group_fingerprints(const DemoGroups &groups,
                                     const FingerprintParams &params) {
  GroupFingerprints out;
  auto fill = [&](const std::vector<Demonstration> &src,
                  std::vector<Fingerprint> &dst) {
    dst.reserve(src.size());
    for (const Demonstration &d: src)
      dst.push_back(fingerprint(d.molecule, params));
  };
  fill(groups.positive, out.positive);
  fill(groups.medium, out.medium);
  fill(groups.negative, out.negative);
  return out;
}

double consistency_from_similarities(double sim_pos, double sim_med,
                                     double sim_neg) {
  double d_pm = std::max(sim_pos - sim_med, 0.0);
  double d_mn = std::max(sim_med - sim_neg, 0.0);
  double d_pn = std::max(sim_pos - sim_neg, 0.0);
  return std::min((d_pm + d_mn + d_pn) / 3.0, 1.0);
}

double consistency_score(const Fingerprint &candidate,
                         const GroupFingerprints &groups) {
  if (groups.positive.empty() && groups.medium.empty() &&
      groups.negative.empty())
    throw Error(ErrorKind::kAllGroupsEmpty, "no demonstrations to compare with");
  return consistency_from_similarities(
      mean_similarity(candidate, groups.positive),
      mean_similarity(candidate, groups.medium),
      mean_similarity(candidate, groups.negative));
}

double consistency_score(const MolecularGraph &candidate,
                         const DemoGroups &groups,
                         const FingerprintParams &params) {
  if (groups.empty())
    throw Error(ErrorKind::kAllGroupsEmpty, "no demonstrations to compare with");
  return consistency_score(fingerprint(candidate, params),
                           group_fingerprints(groups, params));
}

std::vector<double> consistency_scores(const std::vector<Fingerprint> &cands,
                                       const GroupFingerprints &groups,
                                       int threads) {
  if (groups.positive.empty() && groups.medium.empty() &&
      groups.negative.empty())
    throw Error(ErrorKind::kAllGroupsEmpty, "no demonstrations to compare with");
  if (threads <= 1)
    return kernels::serial::consistency_scores(cands, groups);
  return kernels::parallel::consistency_scores(cands, groups, threads);
}

std::vector<int> filter_by_consistency(
    const std::vector<MolecularGraph> &candidates, const DemoGroups &groups,
    int keep, const FingerprintParams &params, int threads,
    std::vector<double> *scores) {
  const int n = static_cast<int>(candidates.size());
  if (keep < 0 || keep > n)
    throw Error(ErrorKind::kInsufficientCandidates,
                "cannot keep " + std::to_string(keep) + " of " +
                    std::to_string(n) + " candidates");
  std::vector<Fingerprint> fps(n);
  std::vector<CanonicalString> keys(n);
  detail::parallel_for(n, threads, [&](std::ptrdiff_t i) {
    fps[i] = fingerprint(candidates[i], params);
    keys[i] = canonical_form(candidates[i]);
  });
  std::vector<double> s =
      consistency_scores(fps, group_fingerprints(groups, params), threads);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (s[a] != s[b])
      return s[a] > s[b];
    return keys[a] < keys[b];
  });
  order.resize(keep);
  if (scores)
    *scores = std::move(s);
  return order;
}

double int_div_from_similarity(const Eigen::MatrixXd &sim, IntDivNorm norm) {
  const Eigen::Index n = sim.rows();
  if (n < 2)
    throw Error(ErrorKind::kTooFewMolecules,
                "internal diversity needs at least two molecules");
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j)
        sum += sim(i, j) * sim(i, j);
  double denom = norm == IntDivNorm::kSquared
                     ? static_cast<double>(n) * static_cast<double>(n)
                     : static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - std::sqrt(sum / denom);
}

double int_div(const std::vector<MolecularGraph> &set,
               const FingerprintParams &params, IntDivNorm norm, int threads) {
  if (set.size() < 2)
    throw Error(ErrorKind::kTooFewMolecules,
                "internal diversity needs at least two molecules");
  std::vector<Fingerprint> fps(set.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(set.size()), threads,
                       [&](std::ptrdiff_t i) {
                         fps[i] = fingerprint(set[i], params);
                       });
  return int_div_from_similarity(pairwise_tanimoto(fps, threads), norm);
}

double harmonic_mean(double a, double b) {
  if (a + b == 0)
    return 0.0;
  return 2.0 * a * b / (a + b);
}

GenerationEval evaluate_generation(const std::vector<ScoredMolecule> &scored,
                                   int k, const FingerprintParams &params,
                                   IntDivNorm norm) {
  const int n = static_cast<int>(scored.size());
  if (k < 1 || k > n)
    throw Error(ErrorKind::kInsufficientCandidates,
                "top-" + std::to_string(k) + " of " + std::to_string(n) +
                    " molecules");
  std::vector<CanonicalString> keys(n);
  for (int i = 0; i < n; ++i)
    keys[i] = canonical_form(scored[i].molecule);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scored[a].score != scored[b].score)
      return scored[a].score > scored[b].score;
    return keys[a] < keys[b];
  });

  GenerationEval ev;
  ev.top1 = scored[order[0]].score;
  std::vector<MolecularGraph> top;
  double sum = 0;
  for (int i = 0; i < k; ++i) {
    sum += scored[order[i]].score;
    top.push_back(scored[order[i]].molecule);
  }
  ev.top_k_mean = sum / k;
  ev.diversity = k >= 2 ? int_div(top, params, norm) : 0.0;
  ev.harmonic = harmonic_mean(ev.top_k_mean, ev.diversity);
  return ev;
}

void write_eval_report(const std::vector<EvalRow> &rows, std::ostream &os) {
  auto put = [&](const GenerationEval &e) {
    os << '\t' << e.top1 << '\t' << e.top_k_mean << '\t' << e.diversity << '\t'
       << e.harmonic << '\n';
  };
  os << std::fixed << std::setprecision(6);
  os << "task_id\tcategory\ttop1\ttopk_mean\tint_div\tharmonic\n";
  std::map<std::string, std::pair<GenerationEval, int>> by_cat;
  for (const EvalRow &r: rows) {
    os << r.task_id << '\t' << r.category;
    put(r.eval);
    auto &[acc, count] = by_cat[r.category];
    acc.top1 += r.eval.top1;
    acc.top_k_mean += r.eval.top_k_mean;
    acc.diversity += r.eval.diversity;
    acc.harmonic += r.eval.harmonic;
    ++count;
  }
  os << "\n# category summary\n";
  os << "category\ttasks\ttop1\ttopk_mean\tint_div\tharmonic\n";
  for (auto &[cat, entry]: by_cat) {
    auto &[acc, count] = entry;
    GenerationEval mean{ acc.top1 / count, acc.top_k_mean / count,
                         acc.diversity / count, acc.harmonic / count };
    os << cat << '\t' << count;
    put(mean);
  }
}

}  // namespace motifdiff
