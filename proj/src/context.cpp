//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/context.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "motifdiff/error.hpp"
#include "motifdiff/rng.hpp"
#include "motifdiff/smiles.hpp"
#include "motifdiff/parallel.hpp"

namespace motifdiff {

ScoreGroup score_group(double score) {
  if (score >= 0.75)
    return ScoreGroup::kPositive;
  if (score > 0.5)
    return ScoreGroup::kMedium;
  return ScoreGroup::kNegative;
}

double pchembl_score(double v_anchor, double v_candidate) {
  double d = std::clamp((v_anchor - v_candidate) / 10.0, 0.0, 1.0);
  return 1.0 - d;
}

std::vector<double> normalize_polymer(const std::vector<double> &values) {
  if (values.empty())
    throw Error(ErrorKind::kDegenerateRange, "no values to normalize");
  for (double v: values) {
    if (!std::isfinite(v))
      throw Error(ErrorKind::kInvalidArgument, "non-finite property value");
  }
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi)
    throw Error(ErrorKind::kDegenerateRange, "all property values are equal");

  std::vector<double> x = values;
  if (lo <= 0) {
    // Shift so the smallest value becomes 1; keeps the ratio test finite.
    double shift = 1 - lo;
    for (double &v: x)
      v += shift;
    lo += shift;
    hi += shift;
  }
  if (hi / lo > 1000) {
    for (double &v: x)
      v = std::log(v);
    lo = std::log(lo);
    hi = std::log(hi);
  }
  for (double &v: x)
    v = (v - lo) / (hi - lo);
  return x;
}

namespace {
bool demo_before(const Demonstration &a, const Demonstration &b) {
  if (a.score != b.score)
    return a.score > b.score;
  return a.key < b.key;
}

void limit_group(std::vector<Demonstration> &g, const PartitionOptions &opts) {
  std::sort(g.begin(), g.end(), demo_before);
  const std::size_t limit = static_cast<std::size_t>(opts.limit_per_group);
  if (g.size() <= limit)
    return;
  if (opts.sample_seed) {
    Rng rng(*opts.sample_seed);
    for (std::size_t i = g.size() - 1; i > 0; --i)
      std::swap(g[i], g[rng.next() % (i + 1)]);
    g.resize(limit);
    std::sort(g.begin(), g.end(), demo_before);
  } else {
    g.resize(limit);
  }
}

std::uint64_t text_hash(const std::string &s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c: s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

DemoGroups partition_demos(std::vector<Demonstration> scored,
                           const PartitionOptions &opts) {
  if (opts.limit_per_group < 0)
    throw Error(ErrorKind::kInvalidArgument, "negative group limit");
  DemoGroups g;
  for (Demonstration &d: scored) {
    if (!(d.score >= 0 && d.score <= 1))
      throw Error(ErrorKind::kInvalidArgument,
                  "demonstration score outside [0, 1]");
    switch (score_group(d.score)) {
    case ScoreGroup::kPositive:
      g.positive.push_back(std::move(d));
      break;
    case ScoreGroup::kMedium:
      g.medium.push_back(std::move(d));
      break;
    case ScoreGroup::kNegative:
      g.negative.push_back(std::move(d));
      break;
    }
  }
  PartitionOptions per = opts;
  int stream = 0;
  for (auto *grp: { &g.positive, &g.medium, &g.negative }) {
    if (opts.sample_seed)
      per.sample_seed = stream_seed(*opts.sample_seed, stream++);
    limit_group(*grp, per);
  }
  return g;
}

std::vector<Task> build_tasks(const std::vector<AssayRecord> &records,
                              const TaskOptions &opts,
                              std::vector<std::string> *diagnostics) {
  std::map<std::string, std::vector<int>> by_assay;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_assay[records[i].assay_id].push_back(static_cast<int>(i));
  std::vector<const std::string *> assays;
  std::vector<const std::vector<int> *> members;
  for (const auto &[id, idx]: by_assay) {
    assays.push_back(&id);
    members.push_back(&idx);
  }

  std::vector<CanonicalString> keys(records.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(records.size()),
                       opts.threads, [&](auto i) {
                         keys[i] = canonical_form(records[i].molecule);
                       });

  std::vector<std::vector<Task>> per_assay(assays.size());
  std::vector<std::string> notes(assays.size());
  detail::parallel_for(
      static_cast<std::ptrdiff_t>(assays.size()), opts.threads, [&](auto a) {
        const std::vector<int> &idx = *members[a];
        std::vector<double> value(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k)
          value[k] = records[idx[k]].value;
        if (opts.mode == TaskMode::kPolymer) {
          try {
            value = normalize_polymer(value);
          } catch (const Error &e) {
            notes[a] = "property " + *assays[a] + ": " + e.what();
            return;
          }
        }
        std::vector<int> anchors;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (opts.mode == TaskMode::kPolymer ||
              records[idx[k]].value > opts.anchor_threshold)
            anchors.push_back(static_cast<int>(k));
        }
        std::stable_sort(anchors.begin(), anchors.end(), [&](int x, int y) {
          return keys[idx[x]] < keys[idx[y]];
        });
        for (int ak: anchors) {
          const AssayRecord &anchor = records[idx[ak]];
          const CanonicalString &akey = keys[idx[ak]];
          std::vector<Demonstration> scored;
          for (std::size_t k = 0; k < idx.size(); ++k) {
            if (static_cast<int>(k) == ak || keys[idx[k]] == akey)
              continue;
            const AssayRecord &c = records[idx[k]];
            double score = opts.mode == TaskMode::kPolymer
                               ? 1.0 - std::abs(value[ak] - value[k])
                               : pchembl_score(anchor.value, c.value);
            scored.push_back({ c.molecule, c.smiles, score, keys[idx[k]] });
          }
          PartitionOptions popts = opts.partition;
          if (popts.sample_seed)
            popts.sample_seed = stream_seed(*popts.sample_seed,
                                            text_hash(*assays[a] + "\n" + akey));
          Task t;
          t.assay_id = anchor.assay_id;
          t.target_smiles = anchor.smiles;
          t.target = anchor.molecule;
          t.target_value = anchor.value;
          t.query_score = 1.0;
          t.context = partition_demos(std::move(scored), popts);
          t.empty_context = t.context.empty();
          t.task_id = anchor.assay_id + "#" +
                      std::to_string(per_assay[a].size());
          per_assay[a].push_back(std::move(t));
        }
      });

  std::vector<Task> out;
  for (std::size_t a = 0; a < assays.size(); ++a) {
    if (diagnostics && !notes[a].empty())
      diagnostics->push_back(notes[a]);
    for (Task &t: per_assay[a])
      out.push_back(std::move(t));
  }
  return out;
}

// --- packing ---

int PackedContext::tokens() const {
  int total = 0;
  for (const PackedItem &it: items)
    total += it.tokens();
  return total;
}

int PackedContext::num_demonstrations() const {
  return static_cast<int>(std::count_if(
      items.begin(), items.end(),
      [](const PackedItem &it) { return it.role != PackRole::kTarget; }));
}

std::string_view pack_role_name(PackRole role) {
  switch (role) {
  case PackRole::kTarget:
    return "target";
  case PackRole::kPositive:
    return "positive";
  case PackRole::kMedium:
    return "medium";
  case PackRole::kNegative:
    return "negative";
  }
  return "unknown";
}

PackedContext pack_context(const DemoGroups &groups,
                           const std::optional<MolecularGraph> &target,
                           const std::string &target_smiles, int budget,
                           const MotifVocabulary &v) {
  PackedContext out;
  out.budget = budget;
  int remaining = budget;
  if (target) {
    PackedItem t{ PackRole::kTarget, encode(*target, v), target_smiles, 1.0 };
    if (t.tokens() > budget)
      throw Error(ErrorKind::kBudgetExceededByTarget,
                  "target needs " + std::to_string(t.tokens()) +
                      " tokens, budget is " + std::to_string(budget));
    remaining -= t.tokens();
    out.items.push_back(std::move(t));
  } else if (budget < 0) {
    throw Error(ErrorKind::kBudgetExceededByTarget, "negative budget");
  }

  const std::vector<Demonstration> *grp[3] = { &groups.positive,
                                               &groups.medium,
                                               &groups.negative };
  const PackRole roles[3] = { PackRole::kPositive, PackRole::kMedium,
                              PackRole::kNegative };
  const int weight[3] = { 2, 1, 1 };
  int total_weight = 0;
  for (int g = 0; g < 3; ++g)
    total_weight += grp[g]->empty() ? 0 : weight[g];
  for (int g = 0; g < 3; ++g) {
    if (grp[g]->empty() || total_weight == 0)
      continue;
    out.quota[g] = remaining * weight[g] / total_weight;
    for (const Demonstration &d: *grp[g]) {
      MotifGraph h = encode(d.molecule, v);
      if (out.used[g] + h.num_nodes() > out.quota[g])
        break;
      out.used[g] += h.num_nodes();
      out.items.push_back({ roles[g], std::move(h), d.smiles, d.score });
    }
  }
  return out;
}

// --- I/O ---

namespace {
std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (std::string &s: out) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
      s.pop_back();
    std::size_t b = s.find_first_not_of(' ');
    s = b == std::string::npos ? std::string() : s.substr(b);
  }
  return out;
}
}  // namespace

std::vector<AssayRecord> read_records_csv(std::istream &is,
                                          std::vector<std::string> &diagnostics) {
  std::string line;
  if (!std::getline(is, line))
    throw Error(ErrorKind::kFormatError, "empty record file");
  std::vector<std::string> header = split_csv(line);
  int c_smiles = -1, c_id = -1, c_value = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "smiles")
      c_smiles = static_cast<int>(c);
    else if (header[c] == "assay_id" || header[c] == "property_id")
      c_id = static_cast<int>(c);
    else if (header[c] == "value")
      c_value = static_cast<int>(c);
  }
  if (c_smiles < 0 || c_id < 0 || c_value < 0)
    throw Error(ErrorKind::kFormatError,
                "header must name smiles, assay_id or property_id, and value");
  const std::size_t need =
      static_cast<std::size_t>(std::max({ c_smiles, c_id, c_value })) + 1;

  std::vector<AssayRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r")
      continue;
    std::vector<std::string> f = split_csv(line);
    std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() < need) {
      diagnostics.push_back(where + "too few columns");
      continue;
    }
    AssayRecord r;
    r.smiles = f[c_smiles];
    r.assay_id = f[c_id];
    try {
      std::size_t used = 0;
      r.value = std::stod(f[c_value], &used);
      if (used != f[c_value].size() || !std::isfinite(r.value))
        throw std::invalid_argument("value");
    } catch (const std::exception &) {
      diagnostics.push_back(where + "bad value '" + f[c_value] + "'");
      continue;
    }
    try {
      r.molecule = parse_smiles(r.smiles);
    } catch (const Error &e) {
      diagnostics.push_back(where + e.what());
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {
nlohmann::json group_json(const std::vector<Demonstration> &g) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Demonstration &d: g)
    arr.push_back({ d.smiles, d.score });
  return arr;
}

std::vector<Demonstration> group_from_json(const nlohmann::json &arr) {
  std::vector<Demonstration> out;
  for (const auto &item: arr) {
    Demonstration d;
    d.smiles = item.at(0).get<std::string>();
    d.score = item.at(1).get<double>();
    d.molecule = parse_smiles(d.smiles);
    d.key = canonical_form(d.molecule);
    out.push_back(std::move(d));
  }
  return out;
}
}  // namespace

void write_task_jsonl(const Task &task, const PackedContext *packed,
                      std::ostream &os) {
  nlohmann::json j;
  j["task_id"] = task.task_id;
  j["assay_id"] = task.assay_id;
  j["target"] = task.target_smiles;
  j["target_value"] = task.target_value;
  j["query_score"] = task.query_score;
  j["empty_context"] = task.empty_context;
  j["positive"] = group_json(task.context.positive);
  j["medium"] = group_json(task.context.medium);
  j["negative"] = group_json(task.context.negative);
  if (packed) {
    nlohmann::json items = nlohmann::json::array();
    for (const PackedItem &it: packed->items)
      items.push_back({ { "role", pack_role_name(it.role) },
                        { "smiles", it.smiles },
                        { "score", it.score },
                        { "tokens", it.tokens() } });
    j["packed"] = std::move(items);
    j["packed_tokens"] = packed->tokens();
    j["budget_tokens"] = packed->budget;
  }
  os << j.dump() << '\n';
}

std::vector<Task> read_tasks_jsonl(std::istream &is) {
  std::vector<Task> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty())
      continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      Task t;
      t.task_id = j.at("task_id").get<std::string>();
      t.assay_id = j.value("assay_id", std::string());
      t.target_smiles = j.value("target", std::string());
      if (!t.target_smiles.empty())
        t.target = parse_smiles(t.target_smiles);
      t.target_value = j.value("target_value", 0.0);
      t.query_score = j.value("query_score", 1.0);
      t.context.positive = group_from_json(j.at("positive"));
      t.context.medium = group_from_json(j.at("medium"));
      t.context.negative = group_from_json(j.at("negative"));
      t.empty_context = t.context.empty();
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorKind::kFormatError, "task line " +
                                               std::to_string(lineno) + ": " +
                                               e.what());
    }
  }
  return out;
}

}  // namespace motifdiff
