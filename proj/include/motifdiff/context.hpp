//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "motifdiff/molgraph.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/tokenizer.hpp"

namespace motifdiff {

struct AssayRecord {
  MolecularGraph molecule;
  std::string smiles;
  std::string assay_id;
  double value = 0;
};

struct Demonstration {
  MolecularGraph molecule;
  std::string smiles;
  double score = 0;
  CanonicalString key;  // ordering tie-break
};

struct DemoGroups {
  std::vector<Demonstration> positive;
  std::vector<Demonstration> medium;
  std::vector<Demonstration> negative;

  bool empty() const {
    return positive.empty() && medium.empty() && negative.empty();
  }
  std::size_t size() const {
    return positive.size() + medium.size() + negative.size();
  }
};

struct Task {
  std::string task_id;
  std::string assay_id;
  std::string target_smiles;
  std::optional<MolecularGraph> target;
  double target_value = 0;
  double query_score = 1.0;
  DemoGroups context;
  // Set when no other record of the assay qualified as a demonstration.
  bool empty_context = false;
};

enum class ScoreGroup { kPositive, kMedium, kNegative };

// Positive [0.75, 1], medium (0.5, 0.75), negative [0, 0.5]; a score of
// exactly 0.75 is positive.
ScoreGroup score_group(double score);

// 1 - clamp((v_anchor - v_candidate) / 10, 0, 1).
double pchembl_score(double v_anchor, double v_candidate);

// Shift to positive if any value is <= 0, take logs when max/min exceeds
// 1000, then min-max scale. Throws Error(kDegenerateRange).
std::vector<double> normalize_polymer(const std::vector<double> &values);

struct PartitionOptions {
  int limit_per_group = 15;
  // When set, overflowing groups keep a seeded random subset instead of the
  // highest scores.
  std::optional<std::uint64_t> sample_seed;
};

// Groups are ordered by score descending, then canonical key.
DemoGroups partition_demos(std::vector<Demonstration> scored,
                           const PartitionOptions &opts = {});

enum class TaskMode { kBioassay, kPolymer };

struct TaskOptions {
  TaskMode mode = TaskMode::kBioassay;
  // Bioassay anchors need value > anchor_threshold.
  double anchor_threshold = 6.0;
  PartitionOptions partition;
  int threads = 1;
};

// Tasks sorted by assay id, then anchor canonical key. Records equal to the
// anchor (same molecular graph) never enter its context. Polymer properties
// whose values are all equal produce no tasks and a diagnostic.
std::vector<Task> build_tasks(const std::vector<AssayRecord> &records,
                              const TaskOptions &opts,
                              std::vector<std::string> *diagnostics = nullptr);

enum class PackRole { kTarget, kPositive, kMedium, kNegative };

struct PackedItem {
  PackRole role;
  MotifGraph graph;
  std::string smiles;
  double score;

  int tokens() const { return graph.num_nodes(); }
};

struct PackedContext {
  std::vector<PackedItem> items;  // target first, then pos, med, neg
  int budget = 0;
  int quota[3] = { 0, 0, 0 };     // tokens allotted to pos, med, neg
  int used[3] = { 0, 0, 0 };

  int tokens() const;
  int num_demonstrations() const;
};

// Token budget counts motif nodes only. Quotas split the budget left after
// the target 2:1:1, with the share of empty groups redistributed over the
// non-empty ones; each group is filled in order until the next molecule no
// longer fits. Throws Error(kBudgetExceededByTarget).
PackedContext pack_context(const DemoGroups &groups,
                           const std::optional<MolecularGraph> &target,
                           const std::string &target_smiles, int budget,
                           const MotifVocabulary &v);

std::string_view pack_role_name(PackRole role);

// CSV with a header naming smiles, an id column (assay_id or property_id) and
// value. Unparsable rows are reported in `diagnostics` and skipped.
std::vector<AssayRecord> read_records_csv(std::istream &is,
                                          std::vector<std::string> &diagnostics);

// One JSON object per line.
void write_task_jsonl(const Task &task, const PackedContext *packed,
                      std::ostream &os);
// Reads tasks back (molecules re-parsed from SMILES). Throws
// Error(kFormatError).
std::vector<Task> read_tasks_jsonl(std::istream &is);

}  // namespace motifdiff
