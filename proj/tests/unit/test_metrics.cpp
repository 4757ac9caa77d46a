//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "motifdiff/error.hpp"
#include "motifdiff/metrics.hpp"
#include "motifdiff/smiles.hpp"
#include "test_util.hpp"

namespace motifdiff {
namespace {

Fingerprint bits(int width, std::initializer_list<int> on) {
  Fingerprint f;
  f.width = width;
  f.words.assign((width + 63) / 64, 0);
  for (int b: on)
    f.words[b >> 6] |= std::uint64_t{ 1 } << (b & 63);
  return f;
}

Demonstration demo(const MolecularGraph &g, double score) {
  return { g, write_smiles(g), score, canonical_form(g) };
}

TEST(Fingerprint, Basics) {
  MolecularGraph g = parse_smiles("CCOc1ccccc1");
  Fingerprint a = fingerprint(g), b = fingerprint(g);
  EXPECT_EQ(a.words, b.words);
  EXPECT_EQ(a.width, 2048);
  EXPECT_EQ(a.radius, 2);
  EXPECT_GT(a.popcount(), 0);
  EXPECT_NE(fingerprint(parse_smiles("C")).words,
            fingerprint(parse_smiles("N")).words);
  EXPECT_EQ(fingerprint(g, { 1, 100 }).width, 100);
}

TEST(Fingerprint, PermutationInvariant) {
  std::mt19937_64 gen(21);
  for (const MolecularGraph &g: test::corpus(200)) {
    std::vector<int> perm(g.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    ASSERT_EQ(fingerprint(permute_atoms(g, perm)).words, fingerprint(g).words);
  }
}

TEST(Tanimoto, Examples) {
  Fingerprint x = bits(64, { 1, 5, 9 });
  EXPECT_EQ(tanimoto(x, x), 1.0);
  EXPECT_EQ(tanimoto(bits(64, { 1, 2 }), bits(64, { 3, 4 })), 0.0);
  // a = 1100, b = 1010
  EXPECT_DOUBLE_EQ(tanimoto(bits(4, { 0, 1 }), bits(4, { 0, 2 })), 1.0 / 3);
  EXPECT_EQ(tanimoto(bits(64, {}), bits(64, {})), 1.0);
  try {
    tanimoto(bits(64, {}), bits(128, {}));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWidthMismatch);
  }
}

TEST(Consistency, FormulaValues) {
  EXPECT_EQ(consistency_from_similarities(0.4, 0.4, 0.4), 0.0);
  EXPECT_NEAR(consistency_from_similarities(1, 0.5, 0), 2.0 / 3, 1e-12);
  EXPECT_EQ(consistency_from_similarities(0, 0.5, 1), 0.0);
  EXPECT_NEAR(consistency_from_similarities(0.9, 0.2, 0.4),
              (0.7 + 0 + 0.5) / 3, 1e-12);
}

TEST(Consistency, EmptyGroups) {
  MolecularGraph c = parse_smiles("CCO");
  try {
    consistency_score(c, DemoGroups{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAllGroupsEmpty);
  }
  DemoGroups only_pos;
  only_pos.positive.push_back(demo(c, 1.0));
  // sim_pos = 1, the others count as 0.
  EXPECT_NEAR(consistency_score(c, only_pos), (1 + 0 + 1) / 3.0, 1e-12);
}

TEST(Consistency, PermutationInvariantAndMonotone) {
  std::vector<MolecularGraph> pool = test::corpus(300);
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 200; ++trial) {
    DemoGroups g;
    for (auto *grp: { &g.positive, &g.medium, &g.negative }) {
      int n = static_cast<int>(gen() % 6);
      for (int i = 0; i < n; ++i)
        grp->push_back(demo(pool[gen() % pool.size()], 0.5));
    }
    if (g.empty())
      continue;
    const MolecularGraph &cand = pool[gen() % pool.size()];
    double s = consistency_score(cand, g);
    DemoGroups shuffled = g;
    std::shuffle(shuffled.positive.begin(), shuffled.positive.end(), gen);
    std::shuffle(shuffled.medium.begin(), shuffled.medium.end(), gen);
    std::shuffle(shuffled.negative.begin(), shuffled.negative.end(), gen);
    EXPECT_NEAR(consistency_score(cand, shuffled), s, 1e-12);

    DemoGroups more = g;
    more.positive.push_back(demo(cand, 1.0));
    EXPECT_GE(consistency_score(cand, more), s - 1e-12);
  }
}

TEST(Consistency, FilterSelectsBest) {
  std::vector<MolecularGraph> pool = test::corpus(400);
  DemoGroups g;
  for (int i = 0; i < 5; ++i) {
    g.positive.push_back(demo(pool[i], 0.9));
    g.medium.push_back(demo(pool[10 + i], 0.6));
    g.negative.push_back(demo(pool[20 + i], 0.1));
  }
  std::vector<MolecularGraph> cands(pool.begin() + 30, pool.end());
  std::vector<double> scores;
  std::vector<int> kept = filter_by_consistency(cands, g, 100, {}, 1, &scores);
  ASSERT_EQ(kept.size(), 100U);
  std::set<int> kept_set(kept.begin(), kept.end());
  EXPECT_EQ(kept_set.size(), 100U);
  double min_kept = 2, max_dropped = -1;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    if (kept_set.contains(i))
      min_kept = std::min(min_kept, scores[i]);
    else
      max_dropped = std::max(max_dropped, scores[i]);
  }
  EXPECT_LE(max_dropped, min_kept);

  std::vector<int> all = filter_by_consistency(cands, g, cands.size());
  EXPECT_EQ(std::set<int>(all.begin(), all.end()).size(), cands.size());
  EXPECT_EQ(filter_by_consistency(cands, g, 100, {}, 4), kept);
  try {
    filter_by_consistency(cands, g, cands.size() + 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientCandidates);
  }
}

double oracle_int_div(const std::vector<MolecularGraph> &set, bool pairs) {
  std::vector<Fingerprint> fp;
  for (const MolecularGraph &g: set)
    fp.push_back(fingerprint(g));
  double sum = 0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j)
      if (i != j)
        sum += std::pow(tanimoto(fp[i], fp[j]), 2);
  double n = static_cast<double>(set.size());
  return 1 - std::sqrt(sum / (pairs ? n * (n - 1) : n * n));
}

TEST(IntDiv, MatchesDoubleLoop) {
  std::vector<MolecularGraph> pool = test::corpus(500);
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MolecularGraph> set;
    for (int i = 0; i < 10; ++i)
      set.push_back(pool[gen() % pool.size()]);
    EXPECT_NEAR(int_div(set), oracle_int_div(set, false), 1e-12);
    EXPECT_NEAR(int_div(set, {}, IntDivNorm::kPairs), oracle_int_div(set, true),
                1e-12);
  }
}

TEST(IntDiv, Examples) {
  MolecularGraph g = parse_smiles("CCO");
  EXPECT_NEAR(int_div({ g, g }), 1 - 1 / std::sqrt(2.0), 1e-12);
  Eigen::MatrixXd sim = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(int_div_from_similarity(sim), 1.0);
  try {
    int_div({ g });
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooFewMolecules);
  }
}

TEST(Evaluation, HarmonicMean) {
  EXPECT_EQ(harmonic_mean(0, 0.7), 0.0);
  EXPECT_EQ(harmonic_mean(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(harmonic_mean(1, 1), 1.0);
  double b = 1 - 1 / std::sqrt(2.0);
  EXPECT_NEAR(harmonic_mean(1, b), 2 * b / (1 + b), 1e-15);
}

TEST(Evaluation, TopK) {
  std::vector<MolecularGraph> pool = test::corpus(30);
  std::vector<ScoredMolecule> scored;
  for (int i = 0; i < 30; ++i)
    scored.push_back({ pool[i], i / 29.0 });
  GenerationEval e = evaluate_generation(scored, 10);
  EXPECT_DOUBLE_EQ(e.top1, 1.0);
  double mean = 0;
  std::vector<MolecularGraph> top;
  for (int i = 20; i < 30; ++i) {
    mean += i / 29.0;
    top.push_back(pool[i]);
  }
  mean /= 10;
  EXPECT_NEAR(e.top_k_mean, mean, 1e-12);
  EXPECT_NEAR(e.diversity, oracle_int_div(top, false), 1e-12);
  EXPECT_NEAR(e.harmonic,
              2 * mean * e.diversity / (mean + e.diversity), 1e-12);

  MolecularGraph g = parse_smiles("CCO");
  GenerationEval same = evaluate_generation({ { g, 1.0 }, { g, 1.0 } }, 2);
  EXPECT_NEAR(same.diversity, 1 - 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(same.harmonic, 2 * same.diversity / (1 + same.diversity), 1e-12);
  EXPECT_THROW(evaluate_generation(scored, 31), Error);
}

TEST(Evaluation, Report) {
  std::vector<EvalRow> rows{ { "t1", "a", { 1, 0.5, 0.5, 0.5 } },
                             { "t2", "a", { 0.5, 0.3, 0.7, 0.42 } },
                             { "t3", "b", { 0.2, 0.1, 0.9, 0.18 } } };
  std::ostringstream os;
  write_eval_report(rows, os);
  std::string s = os.str();
  EXPECT_NE(s.find("t1\ta\t1.000000\t0.500000\t0.500000\t0.500000\n"),
            std::string::npos);
  EXPECT_NE(s.find("a\t2\t0.750000\t0.400000\t0.600000\t0.460000\n"),
            std::string::npos);
}

}  // namespace
}  // namespace motifdiff
