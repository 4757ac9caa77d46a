//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "motifdiff/context.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/smiles.hpp"
#include "test_util.hpp"

namespace motifdiff {
namespace {

Demonstration demo(const std::string &smiles, double score) {
  MolecularGraph g = parse_smiles(smiles);
  return { g, smiles, score, canonical_form(g) };
}

AssayRecord record(const std::string &smiles, const std::string &assay,
                   double value) {
  return { parse_smiles(smiles), smiles, assay, value };
}

std::vector<std::pair<std::string, double>>
flatten(const std::vector<Demonstration> &g) {
  std::vector<std::pair<std::string, double>> out;
  for (const Demonstration &d: g)
    out.emplace_back(d.smiles, d.score);
  return out;
}

TEST(Scores, Bins) {
  EXPECT_EQ(score_group(1.0), ScoreGroup::kPositive);
  EXPECT_EQ(score_group(0.75), ScoreGroup::kPositive);
  EXPECT_EQ(score_group(0.7499), ScoreGroup::kMedium);
  EXPECT_EQ(score_group(0.5001), ScoreGroup::kMedium);
  EXPECT_EQ(score_group(0.5), ScoreGroup::kNegative);
  EXPECT_EQ(score_group(0.0), ScoreGroup::kNegative);
}

TEST(Scores, Pchembl) {
  EXPECT_DOUBLE_EQ(pchembl_score(9, 9), 1.0);
  EXPECT_NEAR(pchembl_score(9, 6), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(pchembl_score(6, 9), 1.0);
  EXPECT_DOUBLE_EQ(pchembl_score(20, 1), 0.0);
  for (double d = -3; d < 15; d += 0.5)
    EXPECT_GE(pchembl_score(9, 9 - d), pchembl_score(9, 9 - d - 0.5));
}

TEST(Scores, PolymerNormalization) {
  std::vector<double> two = normalize_polymer({ 0, 10 });
  EXPECT_DOUBLE_EQ(two[0], 0.0);
  EXPECT_DOUBLE_EQ(two[1], 1.0);

  std::vector<double> wide = normalize_polymer({ 1, 10, 100, 1e6 });
  EXPECT_NEAR(wide[0], 0.0, 1e-15);
  EXPECT_NEAR(wide[1], std::log(10) / std::log(1e6), 1e-15);
  EXPECT_NEAR(wide[2], std::log(100) / std::log(1e6), 1e-15);
  EXPECT_NEAR(wide[3], 1.0, 1e-15);

  std::vector<double> shifted = normalize_polymer({ -5, 0, 5 });
  EXPECT_DOUBLE_EQ(shifted[0], 0.0);
  EXPECT_DOUBLE_EQ(shifted[1], 0.5);
  EXPECT_DOUBLE_EQ(shifted[2], 1.0);

  try {
    normalize_polymer({ 3, 3, 3 });
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateRange);
  }
}

TEST(Partition, OnePerGroup) {
  DemoGroups g = partition_demos({ demo("CC", 1.0), demo("CO", 0.6),
                                   demo("CN", 0.1) });
  EXPECT_EQ(g.positive.size(), 1U);
  EXPECT_EQ(g.medium.size(), 1U);
  EXPECT_EQ(g.negative.size(), 1U);
}

TEST(Partition, LimitKeepsHighestScores) {
  std::vector<std::string> smi = test::corpus_lines(20);
  std::vector<Demonstration> d;
  for (int i = 0; i < 20; ++i)
    d.push_back(demo(smi[i], 0.76 + 0.01 * i));
  DemoGroups g = partition_demos(d);
  ASSERT_EQ(g.positive.size(), 15U);
  for (const Demonstration &x: g.positive)
    EXPECT_GE(x.score, 0.76 + 0.01 * 5 - 1e-12);
  EXPECT_TRUE(std::is_sorted(g.positive.begin(), g.positive.end(),
                             [](const Demonstration &a, const Demonstration &b) {
                               return a.score > b.score;
                             }));
}

TEST(Partition, SeededSubsetIsReproducible) {
  std::vector<std::string> smi = test::corpus_lines(40);
  std::vector<Demonstration> d;
  for (int i = 0; i < 40; ++i)
    d.push_back(demo(smi[i], 0.8));
  PartitionOptions a;
  a.sample_seed = 1;
  PartitionOptions b;
  b.sample_seed = 2;
  EXPECT_EQ(flatten(partition_demos(d, a).positive),
            flatten(partition_demos(d, a).positive));
  EXPECT_NE(flatten(partition_demos(d, a).positive),
            flatten(partition_demos(d, b).positive));
  EXPECT_EQ(partition_demos(d, a).positive.size(), 15U);
}

// Straightforward restatement of the bioassay task rules.
struct RefTask {
  std::string assay, target;
  std::vector<std::pair<std::string, double>> pos, med, neg;
};

std::vector<RefTask> reference_tasks(const std::vector<AssayRecord> &records,
                                     double threshold, std::size_t limit) {
  std::map<std::string, std::vector<const AssayRecord *>> by_assay;
  for (const AssayRecord &r: records)
    by_assay[r.assay_id].push_back(&r);
  std::vector<RefTask> out;
  for (auto &[assay, members]: by_assay) {
    std::vector<const AssayRecord *> anchors;
    for (const AssayRecord *r: members)
      if (r->value > threshold)
        anchors.push_back(r);
    std::stable_sort(anchors.begin(), anchors.end(), [](auto *a, auto *b) {
      return canonical_form(a->molecule) < canonical_form(b->molecule);
    });
    for (const AssayRecord *a: anchors) {
      struct Row {
        double score;
        std::string key, smiles;
      };
      std::vector<Row> pos, med, neg;
      for (const AssayRecord *c: members) {
        if (c == a || canonical_form(c->molecule) == canonical_form(a->molecule))
          continue;
        double d = std::clamp((a->value - c->value) / 10.0, 0.0, 1.0);
        double s = 1 - d;
        Row row{ s, canonical_form(c->molecule), c->smiles };
        (s >= 0.75 ? pos : s > 0.5 ? med : neg).push_back(row);
      }
      auto finish = [&](std::vector<Row> &g) {
        std::sort(g.begin(), g.end(), [](const Row &x, const Row &y) {
          return x.score != y.score ? x.score > y.score : x.key < y.key;
        });
        if (g.size() > limit)
          g.resize(limit);
        std::vector<std::pair<std::string, double>> flat;
        for (const Row &r: g)
          flat.emplace_back(r.smiles, r.score);
        return flat;
      };
      out.push_back({ assay, a->smiles, finish(pos), finish(med), finish(neg) });
    }
  }
  return out;
}

std::vector<AssayRecord> synthetic_assays() {
  std::vector<std::string> smi = test::corpus_lines(120);
  std::vector<AssayRecord> r;
  // Hand-checked assay: anchor 7 against 7, 6 and 2.
  r.push_back(record(smi[0], "A1", 7.0));
  r.push_back(record(smi[1], "A1", 7.0));
  r.push_back(record(smi[2], "A1", 6.0));
  r.push_back(record(smi[3], "A1", 2.0));
  // Boundary values and a duplicate of an anchor molecule.
  r.push_back(record(smi[4], "A2", 8.0));
  r.push_back(record(smi[5], "A2", 5.5));  // score 0.75
  r.push_back(record(smi[6], "A2", 3.0));  // score 0.5
  r.push_back(record(smi[4], "A2", 4.0));  // same molecule as the anchor
  r.push_back(record(smi[7], "A2", 6.0));  // at threshold: not an anchor
  // Overflowing groups.
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(2.0, 9.5);
  for (int i = 8; i < 120; ++i)
    r.push_back(record(smi[i], "A3", std::round(u(gen) * 100) / 100));
  // No anchor at all.
  r.push_back(record(smi[10], "A4", 5.0));
  r.push_back(record(smi[11], "A4", 4.0));
  // Single record.
  r.push_back(record(smi[12], "A5", 8.0));
  return r;
}

TEST(Tasks, HandCheckedAssay) {
  std::vector<AssayRecord> r = synthetic_assays();
  std::vector<Task> tasks = build_tasks(r, {});
  auto it = std::find_if(tasks.begin(), tasks.end(), [&](const Task &t) {
    return t.assay_id == "A1" && t.target_smiles == r[0].smiles;
  });
  ASSERT_NE(it, tasks.end());
  std::vector<double> pos, neg;
  for (const Demonstration &d: it->context.positive)
    pos.push_back(d.score);
  for (const Demonstration &d: it->context.negative)
    neg.push_back(d.score);
  EXPECT_EQ(pos, (std::vector<double>{ 1.0, 0.9 }));
  EXPECT_TRUE(it->context.medium.empty());
  EXPECT_EQ(neg, (std::vector<double>{ 0.5 }));
  EXPECT_EQ(it->query_score, 1.0);
}

TEST(Tasks, MatchBruteForceReference) {
  std::vector<AssayRecord> r = synthetic_assays();
  for (int limit: { 15, 3 }) {
    for (int threads: { 1, 4 }) {
      TaskOptions opts;
      opts.partition.limit_per_group = limit;
      opts.threads = threads;
      std::vector<Task> got = build_tasks(r, opts);
      std::vector<RefTask> ref = reference_tasks(r, 6.0, limit);
      ASSERT_EQ(got.size(), ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k) {
        EXPECT_EQ(got[k].assay_id, ref[k].assay);
        EXPECT_EQ(got[k].target_smiles, ref[k].target);
        EXPECT_EQ(flatten(got[k].context.positive), ref[k].pos);
        EXPECT_EQ(flatten(got[k].context.medium), ref[k].med);
        EXPECT_EQ(flatten(got[k].context.negative), ref[k].neg);
      }
    }
  }
}

TEST(Tasks, AnchorRules) {
  std::vector<AssayRecord> r = synthetic_assays();
  std::vector<Task> tasks = build_tasks(r, {});
  for (const Task &t: tasks) {
    EXPECT_GT(t.target_value, 6.0);
    EXPECT_NE(t.assay_id, "A4");
    CanonicalString key = canonical_form(*t.target);
    for (const auto *g: { &t.context.positive, &t.context.medium,
                          &t.context.negative })
      for (const Demonstration &d: *g)
        EXPECT_NE(d.key, key);
    for (const Demonstration &d: t.context.positive)
      EXPECT_GE(d.score, 0.75);
    for (const Demonstration &d: t.context.medium)
      EXPECT_TRUE(d.score > 0.5 && d.score < 0.75);
    for (const Demonstration &d: t.context.negative)
      EXPECT_LE(d.score, 0.5);
  }
  auto single = std::find_if(tasks.begin(), tasks.end(),
                             [](const Task &t) { return t.assay_id == "A5"; });
  ASSERT_NE(single, tasks.end());
  EXPECT_TRUE(single->empty_context);
}

TEST(Tasks, PolymerMode) {
  std::vector<std::string> smi = test::corpus_lines(6);
  std::vector<AssayRecord> r{ record(smi[0], "P", 1), record(smi[1], "P", 10),
                              record(smi[2], "P", 100),
                              record(smi[3], "Q", 2), record(smi[4], "Q", 2) };
  TaskOptions opts;
  opts.mode = TaskMode::kPolymer;
  std::vector<std::string> diagnostics;
  std::vector<Task> tasks = build_tasks(r, opts, &diagnostics);
  ASSERT_EQ(tasks.size(), 3U);
  EXPECT_EQ(diagnostics.size(), 1U);
  for (const Task &t: tasks)
    EXPECT_EQ(t.context.size(), 2U);
  // Ratio 100 stays linear: normalized values 0, 9/99, 1.
  auto low = std::find_if(tasks.begin(), tasks.end(), [&](const Task &t) {
    return t.target_smiles == smi[0];
  });
  ASSERT_NE(low, tasks.end());
  ASSERT_EQ(low->context.positive.size(), 1U);
  EXPECT_NEAR(low->context.positive[0].score, 1 - 9.0 / 99, 1e-15);
  ASSERT_EQ(low->context.negative.size(), 1U);
  EXPECT_EQ(low->context.negative[0].score, 0.0);
}

TEST(Pack, EmptyGroupsGiveTargetOnly) {
  std::vector<MolecularGraph> corpus = test::corpus(200);
  MotifVocabulary v = train_vocabulary(corpus, 400, 20);
  PackedContext p = pack_context({}, corpus[0], "x", 150, v);
  ASSERT_EQ(p.items.size(), 1U);
  EXPECT_EQ(p.items[0].role, PackRole::kTarget);
  EXPECT_EQ(p.num_demonstrations(), 0);
}

TEST(Pack, BudgetAndAllocation) {
  std::vector<std::string> smi = test::corpus_lines(400);
  std::vector<MolecularGraph> corpus;
  for (const std::string &s: smi)
    corpus.push_back(parse_smiles(s));
  MotifVocabulary v = train_vocabulary(corpus, 600, 40);
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    DemoGroups g;
    int sizes[3] = { static_cast<int>(gen() % 16), static_cast<int>(gen() % 16),
                     static_cast<int>(gen() % 16) };
    std::vector<Demonstration> *dst[3] = { &g.positive, &g.medium,
                                           &g.negative };
    const double score[3] = { 0.9, 0.6, 0.2 };
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < sizes[k]; ++i)
        dst[k]->push_back(demo(smi[gen() % smi.size()], score[k]));
    const int budget = 150;
    PackedContext p =
        pack_context(g, corpus[trial], smi[trial], budget, v);
    ASSERT_LE(p.tokens(), budget);
    const int remaining = budget - p.items[0].tokens();
    int weights = 0;
    for (int k = 0; k < 3; ++k)
      weights += sizes[k] ? (k == 0 ? 2 : 1) : 0;
    for (int k = 0; k < 3; ++k) {
      if (!sizes[k])
        continue;
      int w = k == 0 ? 2 : 1;
      EXPECT_EQ(p.quota[k], remaining * w / weights);
      EXPECT_LE(p.used[k], p.quota[k]);
      // Packed prefix of the group; the next molecule would overflow.
      int taken = 0;
      for (const PackedItem &it: p.items)
        taken += it.role == static_cast<PackRole>(k + 1);
      if (taken < sizes[k]) {
        int next = encode((*dst[k])[taken].molecule, v).num_nodes();
        EXPECT_GT(p.used[k] + next, p.quota[k]);
      }
    }
  }
}

TEST(Pack, TargetOverBudget) {
  std::vector<MolecularGraph> corpus = test::corpus(100);
  MotifVocabulary v = train_vocabulary(corpus, 300, 10);
  try {
    pack_context({}, corpus[0], "x", 0, v);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetExceededByTarget);
  }
}

TEST(Records, CsvReading) {
  std::istringstream is("value,smiles,assay_id\n"
                        "7.5,CCO,A\n"
                        "oops,CCO,A\n"
                        "6.1,C1CC,A\n"
                        "5.0,\"CC(=O)O\",B\n"
                        "4\n");
  std::vector<std::string> diagnostics;
  std::vector<AssayRecord> r = read_records_csv(is, diagnostics);
  ASSERT_EQ(r.size(), 2U);
  EXPECT_EQ(r[0].assay_id, "A");
  EXPECT_EQ(r[0].value, 7.5);
  EXPECT_EQ(r[1].smiles, "CC(=O)O");
  EXPECT_EQ(diagnostics.size(), 3U);

  std::istringstream bad("smiles,value\nCC,1\n");
  EXPECT_THROW(read_records_csv(bad, diagnostics), Error);
}

TEST(Records, TaskJsonRoundTrip) {
  std::vector<AssayRecord> r = synthetic_assays();
  std::vector<Task> tasks = build_tasks(r, {});
  std::stringstream ss;
  for (const Task &t: tasks)
    write_task_jsonl(t, nullptr, ss);
  std::vector<Task> back = read_tasks_jsonl(ss);
  ASSERT_EQ(back.size(), tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    EXPECT_EQ(back[k].task_id, tasks[k].task_id);
    EXPECT_EQ(back[k].target_smiles, tasks[k].target_smiles);
    EXPECT_EQ(flatten(back[k].context.positive),
              flatten(tasks[k].context.positive));
    EXPECT_EQ(flatten(back[k].context.negative),
              flatten(tasks[k].context.negative));
  }
  std::istringstream bad("{\"task_id\": 1}\n");
  EXPECT_THROW(read_tasks_jsonl(bad), Error);
}

}  // namespace
}  // namespace motifdiff
