//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Command-line driver. Each subcommand writes its outputs plus a resolved
// config (<out>.config.json). Exit codes: 0 success, 1 data error, 2 usage.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motifdiff/context.hpp"
#include "motifdiff/diffusion.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/kernels.hpp"
#include "motifdiff/metrics.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/parallel.hpp"
#include "motifdiff/smiles.hpp"
#include "motifdiff/tokenizer.hpp"
#include "motifdiff/version.hpp"

namespace md = motifdiff;
using nlohmann::json;

namespace {

struct Common {
  int threads = 1;
  std::uint64_t seed = 0;
  bool strict = false;
};

struct Corpus {
  std::vector<std::string> lines;  // SMILES field of every usable record
  std::vector<int> line_numbers;
  std::vector<md::MolecularGraph> molecules;
  int rejected = 0;
};

std::ifstream open_in(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw md::Error(md::ErrorKind::kInvalidArgument, "cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw md::Error(md::ErrorKind::kInvalidArgument,
                    "cannot write " + path);
  return os;
}

void diag(const std::string &where, const std::string &msg) {
  std::cerr << where << ": " << msg << '\n';
}

// One SMILES per line; anything after the first tab or space is ignored.
// Records that fail to parse are reported and skipped (or fatal with
// --strict).
Corpus read_corpus(const std::string &path, const Common &c) {
  std::ifstream is = open_in(path);
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    raw.push_back(line.substr(0, line.find_first_of("\t ")));
  }
  std::vector<std::optional<md::MolecularGraph>> parsed(raw.size());
  std::vector<std::string> errors(raw.size());
  md::detail::parallel_for(static_cast<std::ptrdiff_t>(raw.size()), c.threads,
                           [&](std::ptrdiff_t i) {
                             if (raw[i].empty())
                               return;
                             try {
                               parsed[i] = md::parse_smiles(raw[i]);
                             } catch (const md::Error &e) {
                               errors[i] = e.what();
                             }
                           });
  Corpus out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!errors[i].empty()) {
      diag(path + ":" + std::to_string(i + 1), errors[i]);
      ++out.rejected;
      continue;
    }
    if (!parsed[i])
      continue;
    out.lines.push_back(raw[i]);
    out.line_numbers.push_back(static_cast<int>(i + 1));
    out.molecules.push_back(std::move(*parsed[i]));
  }
  if (c.strict && out.rejected)
    throw md::Error(md::ErrorKind::kParseError,
                    std::to_string(out.rejected) + " unparsable records");
  if (out.molecules.empty())
    throw md::Error(md::ErrorKind::kCorpusEmpty, "no usable records in " + path);
  return out;
}

md::MotifVocabulary read_vocab(const std::string &path) {
  std::ifstream is = open_in(path);
  return md::load_vocabulary(is);
}

std::vector<md::MotifGraph> read_encoded_file(const std::string &path) {
  std::ifstream is = open_in(path);
  return md::read_encoded(is);
}

md::Marginals read_marginals(const std::string &path) {
  std::ifstream is = open_in(path);
  return md::load_marginals(is);
}

void write_config(const std::string &out, const std::string &command,
                  const Common &c, json params) {
  json j;
  j["command"] = command;
  j["version"] = md::kVersion;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["strict"] = c.strict;
  j["parameters"] = std::move(params);
  std::ofstream os = open_out(out + ".config.json");
  os << j.dump(2) << '\n';
}

md::FingerprintParams fp_params(int radius, int width) {
  md::FingerprintParams p;
  p.radius = radius;
  p.width = width;
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0)
    return 0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- commands

struct TrainArgs {
  std::string corpus, out, trace;
  int k = 3000;
  int k_ring = 300;
  long min_frequency = 1;
};

int run_train(const TrainArgs &a, const Common &c) {
  Corpus corpus = read_corpus(a.corpus, c);
  md::TrainOptions opts;
  opts.k = a.k;
  opts.k_ring = a.k_ring;
  opts.min_frequency = a.min_frequency;
  opts.threads = c.threads;
  std::vector<md::TrainTraceEntry> trace;
  md::MotifVocabulary v = md::train_vocabulary(
      corpus.molecules, opts, a.trace.empty() ? nullptr : &trace);
  v.corpus_hash = md::corpus_hash(corpus.lines);
  {
    std::ofstream os = open_out(a.out);
    md::save_vocabulary(v, os);
  }
  if (!a.trace.empty()) {
    std::ofstream os = open_out(a.trace);
    os << "# iteration\tfrequency\tselected\tcompetitors\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
      os << i << '\t' << trace[i].frequency << '\t' << trace[i].selected
         << '\t';
      for (std::size_t k = 0; k < trace[i].top_candidates.size(); ++k) {
        const auto &[f, size, key] = trace[i].top_candidates[k];
        os << (k ? " " : "") << key << '=' << f;
      }
      os << '\n';
    }
  }
  write_config(a.out, "train-vocab", c,
               { { "corpus", a.corpus },
                 { "out", a.out },
                 { "trace", a.trace },
                 { "k", a.k },
                 { "k_ring", a.k_ring },
                 { "min_frequency", a.min_frequency },
                 { "molecules", corpus.molecules.size() },
                 { "rejected", corpus.rejected } });
  std::cout << "vocabulary: " << v.size() << " motifs, " << v.merges().size()
            << " merges, " << v.num_seed_rings << " seed rings\n";
  return 0;
}

struct EncodeArgs {
  std::string corpus, vocab, out;
};

// Encodes every molecule, reporting failures per record.
std::vector<std::optional<md::MotifGraph>>
encode_records(const Corpus &corpus, const md::MotifVocabulary &v,
               const std::string &path, int threads, int &failures) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.molecules.size());
  std::vector<std::optional<md::MotifGraph>> out(n);
  std::vector<std::string> errors(n);
  md::detail::parallel_for(n, threads, [&](std::ptrdiff_t i) {
    try {
      out[i] = md::encode(corpus.molecules[i], v);
    } catch (const md::Error &e) {
      errors[i] = e.what();
    }
  });
  failures = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      diag(path + ":" + std::to_string(corpus.line_numbers[i]), errors[i]);
      ++failures;
    }
  }
  return out;
}

int run_encode(const EncodeArgs &a, const Common &c) {
  Corpus corpus = read_corpus(a.corpus, c);
  md::MotifVocabulary v = read_vocab(a.vocab);
  int failures = 0;
  auto encoded = encode_records(corpus, v, a.corpus, c.threads, failures);
  std::vector<md::MotifGraph> ok;
  for (auto &h: encoded)
    if (h)
      ok.push_back(std::move(*h));
  {
    std::ofstream os = open_out(a.out);
    md::write_encoded(ok, os);
  }
  write_config(a.out, "encode", c,
               { { "corpus", a.corpus },
                 { "vocab", a.vocab },
                 { "out", a.out },
                 { "encoded", ok.size() },
                 { "failed", failures },
                 { "rejected", corpus.rejected } });
  std::cout << "encoded " << ok.size() << " molecules, " << failures
            << " failures\n";
  return failures && c.strict ? 1 : 0;
}

struct DecodeArgs {
  std::string encoded, vocab, out;
};

int run_decode(const DecodeArgs &a, const Common &c) {
  md::MotifVocabulary v = read_vocab(a.vocab);
  std::vector<md::MotifGraph> encoded = read_encoded_file(a.encoded);
  const auto n = static_cast<std::ptrdiff_t>(encoded.size());
  std::vector<std::string> smiles(n), errors(n);
  md::detail::parallel_for(n, c.threads, [&](std::ptrdiff_t i) {
    try {
      smiles[i] = md::write_smiles(md::decode(encoded[i], v));
    } catch (const md::Error &e) {
      errors[i] = e.what();
    }
  });
  int failures = 0;
  {
    std::ofstream os = open_out(a.out);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (!errors[i].empty()) {
        diag(a.encoded + " record " + std::to_string(i), errors[i]);
        ++failures;
        os << '\n';  // keep record alignment
        continue;
      }
      os << smiles[i] << '\n';
    }
  }
  write_config(a.out, "decode", c,
               { { "encoded", a.encoded },
                 { "vocab", a.vocab },
                 { "out", a.out },
                 { "failed", failures } });
  return failures ? 1 : 0;
}

struct StatsArgs {
  std::string corpus, vocab, out;
};

int run_stats(const StatsArgs &a, const Common &c) {
  Corpus corpus = read_corpus(a.corpus, c);
  md::MotifVocabulary v = read_vocab(a.vocab);
  int failures = 0;
  auto encoded = encode_records(corpus, v, a.corpus, c.threads, failures);
  std::vector<double> atoms, motifs, ratios;
  std::ofstream os = open_out(a.out);
  os << std::fixed << std::setprecision(6);
  os << "line\tatoms\tmotifs\tratio\n";
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (!encoded[i])
      continue;
    int na = corpus.molecules[i].num_atoms();
    int nm = encoded[i]->num_nodes();
    double r = static_cast<double>(na) / nm;
    atoms.push_back(na);
    motifs.push_back(nm);
    ratios.push_back(r);
    os << corpus.line_numbers[i] << '\t' << na << '\t' << nm << '\t' << r
       << '\n';
  }
  const double n = static_cast<double>(ratios.size());
  double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / n;
  double ss = 0;
  for (double r: ratios)
    ss += (r - mean) * (r - mean);
  double sd = ratios.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  double mean_atoms = std::accumulate(atoms.begin(), atoms.end(), 0.0) / n;
  double mean_motifs = std::accumulate(motifs.begin(), motifs.end(), 0.0) / n;
  std::ostringstream summary;
  summary << std::fixed << std::setprecision(6);
  summary << "# molecules\t" << ratios.size() << '\n'
          << "# failed\t" << failures << '\n'
          << "# ratio_mean\t" << mean << '\n'
          << "# ratio_std\t" << sd << '\n'
          << "# atoms_mean\t" << mean_atoms << '\n'
          << "# motifs_mean\t" << mean_motifs << '\n'
          << "# atoms_median\t" << median(atoms) << '\n'
          << "# motifs_median\t" << median(motifs) << '\n';
  os << summary.str();
  std::cout << summary.str();
  write_config(a.out, "stats", c,
               { { "corpus", a.corpus }, { "vocab", a.vocab }, { "out", a.out } });
  return 0;
}

struct MarginalsArgs {
  std::string encoded, vocab, out;
  int n_max = 0;
};

int run_marginals(const MarginalsArgs &a, const Common &c) {
  md::MotifVocabulary v = read_vocab(a.vocab);
  std::vector<md::MotifGraph> encoded = read_encoded_file(a.encoded);
  int n_max = a.n_max;
  for (const md::MotifGraph &h: encoded)
    if (a.n_max == 0)
      n_max = std::max(n_max, h.num_nodes());
  md::FeatureLayout layout = md::FeatureLayout::for_vocabulary(v, n_max);
  md::Marginals m = md::estimate_marginals(encoded, layout);
  {
    std::ofstream os = open_out(a.out);
    md::save_marginals(m, os);
  }
  write_config(a.out, "marginals", c,
               { { "encoded", a.encoded },
                 { "vocab", a.vocab },
                 { "out", a.out },
                 { "n_max", n_max } });
  return 0;
}

struct DiffuseArgs {
  std::string encoded, marginals, out;
  int t_max = 500;
  double s = 0.008;
  std::vector<int> steps;
};

int run_diffuse(const DiffuseArgs &a, const Common &c) {
  std::vector<md::MotifGraph> encoded = read_encoded_file(a.encoded);
  md::Marginals m = read_marginals(a.marginals);
  md::Schedule sched{ a.t_max, a.s };
  std::vector<int> steps = a.steps;
  if (steps.empty())
    steps = { 0, a.t_max / 4, a.t_max / 2, 3 * a.t_max / 4, a.t_max };
  for (int t: steps)
    if (t < 0 || t > a.t_max)
      throw md::Error(md::ErrorKind::kOutOfRangeStep,
                      "step " + std::to_string(t) + " outside [0, T]");

  const auto n = static_cast<std::ptrdiff_t>(encoded.size());
  std::vector<std::string> blocks(n);
  md::detail::parallel_for(n, c.threads, [&](std::ptrdiff_t i) {
    md::Rng rng(md::stream_seed(c.seed, static_cast<std::uint64_t>(i)));
    md::TokenState x0 = md::to_token_state(encoded[i]);
    md::Trajectory traj;
    for (int t: steps) {
      traj.states.push_back(md::forward_sample(x0, t, m, sched, rng));
      traj.steps.push_back(t);
    }
    std::ostringstream os;
    os << "# molecule " << i << '\n';
    md::write_trajectory(traj, os);
    blocks[i] = os.str();
  });
  std::ofstream os = open_out(a.out);
  os << "# " << md::kTrajectoryFormat << '\n';
  for (const std::string &b: blocks)
    os << b;
  write_config(a.out, "diffuse", c,
               { { "encoded", a.encoded },
                 { "marginals", a.marginals },
                 { "out", a.out },
                 { "T", a.t_max },
                 { "s", a.s },
                 { "steps", steps } });
  return 0;
}

struct SampleArgs {
  std::string vocab, marginals, out, encoded, trajectories;
  std::string denoiser = "marginal";
  int index = 0;
  int count = 16;
  int n_nodes = 8;
  int t_max = 500;
  double s = 0.008;
  bool argmax = false;
};

int run_sample(const SampleArgs &a, const Common &c) {
  md::MotifVocabulary v = read_vocab(a.vocab);
  md::Marginals m = read_marginals(a.marginals);
  if (m.f_motif() != v.size())
    throw md::Error(md::ErrorKind::kShapeMismatch,
                    "marginals were estimated for a different vocabulary");
  md::Schedule sched{ a.t_max, a.s };
  md::SamplerOptions opts;
  opts.n_nodes = a.n_nodes;
  opts.argmax_x0 = a.argmax;

  std::unique_ptr<md::Denoiser> d;
  md::FeatureLayout layout;
  if (a.denoiser == "oracle") {
    if (a.encoded.empty())
      throw md::Error(md::ErrorKind::kInvalidArgument,
                      "the oracle denoiser needs --encoded");
    std::vector<md::MotifGraph> encoded = read_encoded_file(a.encoded);
    if (a.index < 0 || a.index >= static_cast<int>(encoded.size()))
      throw md::Error(md::ErrorKind::kInvalidArgument,
                      "--index outside the encoded corpus");
    md::TokenState x0 = md::to_token_state(encoded[a.index]);
    opts.n_nodes = x0.n;
    layout = md::FeatureLayout::for_vocabulary(v, x0.n);
    d = std::make_unique<md::OracleDenoiser>(x0, layout);
  } else {
    layout = md::FeatureLayout::for_vocabulary(v, a.n_nodes);
    if (a.denoiser == "uniform")
      d = std::make_unique<md::UniformDenoiser>(layout);
    else
      d = std::make_unique<md::MarginalDenoiser>(m, layout);
  }

  std::vector<md::Trajectory> trajs = md::reverse_sample_batch(
      *d, {}, layout, m, sched, opts, c.seed, a.count, c.threads, &v);
  int decodable = 0;
  {
    std::ofstream os = open_out(a.out);
    os << "sample\tstatus\tsmiles\n";
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      const md::Trajectory &t = trajs[k];
      os << k << '\t';
      std::string smiles;
      std::string error = t.error;
      if (t.status == md::TrajectoryStatus::kOk) {
        try {
          smiles = md::write_smiles(md::decode(t.final_graph, v));
        } catch (const md::Error &e) {
          error = e.what();
        }
      }
      if (smiles.empty()) {
        os << "non-decodable\t" << error << '\n';
      } else {
        os << "ok\t" << smiles << '\n';
        ++decodable;
      }
    }
  }
  if (!a.trajectories.empty()) {
    std::ofstream os = open_out(a.trajectories);
    os << "# " << md::kTrajectoryFormat << '\n';
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      os << "# sample " << k << '\n';
      md::write_trajectory(trajs[k], os);
    }
  }
  write_config(a.out, "sample", c,
               { { "vocab", a.vocab },
                 { "marginals", a.marginals },
                 { "encoded", a.encoded },
                 { "out", a.out },
                 { "trajectories", a.trajectories },
                 { "denoiser", a.denoiser },
                 { "index", a.index },
                 { "count", a.count },
                 { "n_nodes", opts.n_nodes },
                 { "T", a.t_max },
                 { "s", a.s },
                 { "argmax", a.argmax } });
  std::cout << decodable << " of " << trajs.size() << " samples decodable\n";
  return 0;
}

struct TasksArgs {
  std::string records, out, vocab;
  std::string mode = "bioassay";
  double anchor_threshold = 6.0;
  int limit_per_group = 15;
  int budget_tokens = 150;
  bool random_subset = false;
};

int run_build_tasks(const TasksArgs &a, const Common &c) {
  std::vector<std::string> diagnostics;
  std::vector<md::AssayRecord> records;
  {
    std::ifstream is = open_in(a.records);
    records = md::read_records_csv(is, diagnostics);
  }
  md::TaskOptions opts;
  opts.mode = a.mode == "polymer" ? md::TaskMode::kPolymer
                                  : md::TaskMode::kBioassay;
  opts.anchor_threshold = a.anchor_threshold;
  opts.partition.limit_per_group = a.limit_per_group;
  if (a.random_subset)
    opts.partition.sample_seed = c.seed;
  opts.threads = c.threads;
  std::vector<md::Task> tasks = md::build_tasks(records, opts, &diagnostics);

  std::optional<md::MotifVocabulary> v;
  if (!a.vocab.empty())
    v = read_vocab(a.vocab);
  std::ofstream os = open_out(a.out);
  int packed_tasks = 0;
  for (const md::Task &t: tasks) {
    if (!v) {
      md::write_task_jsonl(t, nullptr, os);
      continue;
    }
    try {
      md::PackedContext p = md::pack_context(t.context, t.target,
                                             t.target_smiles, a.budget_tokens,
                                             *v);
      md::write_task_jsonl(t, &p, os);
      ++packed_tasks;
    } catch (const md::Error &e) {
      diagnostics.push_back("task " + t.task_id + ": " + e.what());
      md::write_task_jsonl(t, nullptr, os);
    }
  }
  for (const std::string &d: diagnostics)
    std::cerr << a.records << ": " << d << '\n';
  write_config(a.out, "build-tasks", c,
               { { "records", a.records },
                 { "out", a.out },
                 { "vocab", a.vocab },
                 { "mode", a.mode },
                 { "anchor_threshold", a.anchor_threshold },
                 { "limit_per_group", a.limit_per_group },
                 { "budget_tokens", a.budget_tokens },
                 { "random_subset", a.random_subset },
                 { "tasks", tasks.size() },
                 { "packed_tasks", packed_tasks },
                 { "diagnostics", diagnostics.size() } });
  std::cout << tasks.size() << " tasks, " << diagnostics.size()
            << " diagnostics\n";
  return 0;
}

struct ConsistencyArgs {
  std::string tasks, task_id, candidates, out;
  int keep = -1;
  int radius = 2;
  int width = 2048;
};

int run_consistency(const ConsistencyArgs &a, const Common &c) {
  std::vector<md::Task> tasks;
  {
    std::ifstream is = open_in(a.tasks);
    tasks = md::read_tasks_jsonl(is);
  }
  if (tasks.empty())
    throw md::Error(md::ErrorKind::kFormatError, "no tasks in " + a.tasks);
  const md::Task *task = &tasks.front();
  if (!a.task_id.empty()) {
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const md::Task &t) {
      return t.task_id == a.task_id;
    });
    if (it == tasks.end())
      throw md::Error(md::ErrorKind::kInvalidArgument,
                      "no task " + a.task_id + " in " + a.tasks);
    task = &*it;
  }
  Corpus cands = read_corpus(a.candidates, c);
  const int keep =
      a.keep < 0 ? static_cast<int>(cands.molecules.size()) : a.keep;
  std::vector<double> scores;
  std::vector<int> kept =
      md::filter_by_consistency(cands.molecules, task->context, keep,
                                fp_params(a.radius, a.width), c.threads,
                                &scores);
  std::ofstream os = open_out(a.out);
  os << std::setprecision(17);
  os << "rank\tline\tscore\tsmiles\n";
  for (std::size_t r = 0; r < kept.size(); ++r) {
    int i = kept[r];
    os << r << '\t' << cands.line_numbers[i] << '\t' << scores[i] << '\t'
       << cands.lines[i] << '\n';
  }
  write_config(a.out, "consistency", c,
               { { "tasks", a.tasks },
                 { "task_id", task->task_id },
                 { "candidates", a.candidates },
                 { "out", a.out },
                 { "keep", keep },
                 { "radius", a.radius },
                 { "width", a.width } });
  return 0;
}

struct EvaluateArgs {
  std::string scored, out;
  int k = 10;
  int radius = 2;
  int width = 2048;
  std::string norm = "squared";
};

// Input: TSV with header task_id, category, smiles, score.
int run_evaluate(const EvaluateArgs &a, const Common &c) {
  std::ifstream is = open_in(a.scored);
  std::string line;
  if (!std::getline(is, line))
    throw md::Error(md::ErrorKind::kFormatError, a.scored + " is empty");
  std::map<std::string, int> col;
  {
    std::istringstream hs(line);
    std::string name;
    for (int i = 0; std::getline(hs, name, '\t'); ++i) {
      if (!name.empty() && name.back() == '\r')
        name.pop_back();
      col[name] = i;
    }
  }
  for (const char *need: { "task_id", "smiles", "score" })
    if (!col.contains(need))
      throw md::Error(md::ErrorKind::kFormatError,
                      a.scored + " header lacks column " + need);

  std::map<std::string, std::string> category;
  std::map<std::string, std::vector<md::ScoredMolecule>> by_task;
  int errors = 0;
  for (int lineno = 2; std::getline(is, line); ++lineno) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string x; std::getline(ls, x, '\t');)
      f.push_back(x);
    auto field = [&](const std::string &name) -> std::string {
      int i = col.at(name);
      return i < static_cast<int>(f.size()) ? f[i] : std::string();
    };
    try {
      md::ScoredMolecule sm{ md::parse_smiles(field("smiles")),
                             std::stod(field("score")) };
      std::string id = field("task_id");
      category.emplace(id, col.contains("category") ? field("category")
                                                     : std::string("all"));
      by_task[id].push_back(std::move(sm));
    } catch (const std::exception &e) {
      diag(a.scored + ":" + std::to_string(lineno), e.what());
      ++errors;
    }
  }
  if (errors && c.strict)
    return 1;

  md::IntDivNorm norm =
      a.norm == "pairs" ? md::IntDivNorm::kPairs : md::IntDivNorm::kSquared;
  std::vector<std::pair<std::string, std::vector<md::ScoredMolecule>>> items(
      by_task.begin(), by_task.end());
  std::vector<std::optional<md::EvalRow>> rows(items.size());
  std::vector<std::string> failures(items.size());
  md::detail::parallel_for(
      static_cast<std::ptrdiff_t>(items.size()), c.threads,
      [&](std::ptrdiff_t i) {
        try {
          rows[i] = md::EvalRow{ items[i].first, category[items[i].first],
                                 md::evaluate_generation(
                                     items[i].second, a.k,
                                     fp_params(a.radius, a.width), norm) };
        } catch (const md::Error &e) {
          failures[i] = e.what();
        }
      });
  std::vector<md::EvalRow> ok;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (rows[i])
      ok.push_back(*rows[i]);
    else
      diag("task " + items[i].first, failures[i]);
  }
  {
    std::ofstream os = open_out(a.out);
    md::write_eval_report(ok, os);
  }
  write_config(a.out, "evaluate", c,
               { { "scored", a.scored },
                 { "out", a.out },
                 { "k", a.k },
                 { "radius", a.radius },
                 { "width", a.width },
                 { "int_div_norm", a.norm } });
  return ok.empty() ? 1 : 0;
}

struct RoundtripArgs {
  std::string corpus, vocab, out;
};

int run_roundtrip(const RoundtripArgs &a, const Common &c) {
  Corpus corpus = read_corpus(a.corpus, c);
  md::MotifVocabulary v = read_vocab(a.vocab);
  const auto n = static_cast<std::ptrdiff_t>(corpus.molecules.size());
  std::vector<std::string> reasons(n);
  md::detail::parallel_for(n, c.threads, [&](std::ptrdiff_t i) {
    try {
      md::MolecularGraph back = md::decode(md::encode(corpus.molecules[i], v), v);
      if (!md::graphs_equal(back, corpus.molecules[i]))
        reasons[i] = "decoded graph differs";
    } catch (const md::Error &e) {
      reasons[i] = e.what();
    }
  });
  int failed = 0;
  std::ostringstream fails;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (reasons[i].empty())
      continue;
    ++failed;
    fails << corpus.line_numbers[i] << '\t' << corpus.lines[i] << '\t'
          << reasons[i] << '\n';
  }
  std::ofstream os = open_out(a.out);
  os << "# molecules\t" << n << '\n'
     << "# passed\t" << n - failed << '\n'
     << "# failed\t" << failed << '\n'
     << "line\tsmiles\treason\n"
     << fails.str();
  write_config(a.out, "roundtrip-check", c,
               { { "corpus", a.corpus }, { "vocab", a.vocab }, { "out", a.out } });
  std::cout << n - failed << " of " << n << " molecules round-trip\n";
  return failed ? 1 : 0;
}

std::string version_text() {
  std::ostringstream os;
  os << "motifdiff " << md::kVersion << '\n'
     << "vocabulary format " << md::kVocabFormatVersion << '\n'
     << "encoded format " << md::kEncodedFormat << '\n'
     << "marginals format " << md::kMarginalsFormat << '\n'
     << "trajectory format " << md::kTrajectoryFormat << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{ "Motif-level molecular tokenizer and discrete graph diffusion "
                "toolkit" };
  app.require_subcommand(1);
  app.set_version_flag("--version", version_text());

  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--threads", common.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    sub->add_flag("--strict", common.strict,
                  "Treat any rejected record as a failure");
  };
  auto path = [](CLI::App *sub, const std::string &name, std::string &dst,
                 const std::string &env, const std::string &help,
                 bool required = true) {
    CLI::Option *o = sub->add_option(name, dst, help)->envname(env);
    if (required)
      o->required();
    return o;
  };

  TrainArgs train;
  auto *s_train = app.add_subcommand("train-vocab", "Learn a motif vocabulary");
  path(s_train, "--corpus", train.corpus, "MOTIFDIFF_CORPUS", "SMILES corpus");
  path(s_train, "--out", train.out, "MOTIFDIFF_VOCAB_OUT", "Vocabulary file");
  path(s_train, "--trace", train.trace, "MOTIFDIFF_TRACE",
       "Per-merge selection trace", false);
  s_train->add_option("--k", train.k, "Vocabulary size")->capture_default_str();
  s_train->add_option("--k-ring", train.k_ring, "Seed ring systems")
      ->capture_default_str();
  s_train->add_option("--min-frequency", train.min_frequency,
                      "Stop when the best candidate is rarer")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(s_train);

  EncodeArgs enc;
  auto *s_enc = app.add_subcommand("encode", "Encode a corpus into motif graphs");
  path(s_enc, "--corpus", enc.corpus, "MOTIFDIFF_CORPUS", "SMILES corpus");
  path(s_enc, "--vocab", enc.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_enc, "--out", enc.out, "MOTIFDIFF_ENCODED_OUT", "Encoded corpus");
  add_common(s_enc);

  DecodeArgs dec;
  auto *s_dec = app.add_subcommand("decode", "Decode motif graphs to SMILES");
  path(s_dec, "--encoded", dec.encoded, "MOTIFDIFF_ENCODED", "Encoded corpus");
  path(s_dec, "--vocab", dec.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_dec, "--out", dec.out, "MOTIFDIFF_SMILES_OUT", "SMILES output");
  add_common(s_dec);

  StatsArgs stats;
  auto *s_stats = app.add_subcommand("stats", "Compression statistics");
  path(s_stats, "--corpus", stats.corpus, "MOTIFDIFF_CORPUS", "SMILES corpus");
  path(s_stats, "--vocab", stats.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_stats, "--out", stats.out, "MOTIFDIFF_STATS_OUT", "TSV report");
  add_common(s_stats);

  MarginalsArgs marg;
  auto *s_marg = app.add_subcommand("marginals", "Estimate diffusion marginals");
  path(s_marg, "--encoded", marg.encoded, "MOTIFDIFF_ENCODED", "Encoded corpus");
  path(s_marg, "--vocab", marg.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_marg, "--out", marg.out, "MOTIFDIFF_MARGINALS_OUT", "Marginals file");
  s_marg->add_option("--n-max", marg.n_max,
                     "Node slots per graph (0: largest in corpus)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_common(s_marg);

  DiffuseArgs dif;
  auto *s_dif = app.add_subcommand("diffuse", "Forward-noise encoded graphs");
  path(s_dif, "--encoded", dif.encoded, "MOTIFDIFF_ENCODED", "Encoded corpus");
  path(s_dif, "--marginals", dif.marginals, "MOTIFDIFF_MARGINALS",
       "Marginals file");
  path(s_dif, "--out", dif.out, "MOTIFDIFF_TRAJECTORY_OUT", "Trajectory dump");
  s_dif->add_option("--T", dif.t_max, "Diffusion steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_dif->add_option("--s", dif.s, "Schedule offset")->capture_default_str();
  s_dif->add_option("--steps", dif.steps, "Steps to record (default 0..T by T/4)")
      ->delimiter(',');
  add_common(s_dif);

  SampleArgs smp;
  auto *s_smp = app.add_subcommand("sample", "Reverse diffusion sampling");
  path(s_smp, "--vocab", smp.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_smp, "--marginals", smp.marginals, "MOTIFDIFF_MARGINALS",
       "Marginals file");
  path(s_smp, "--out", smp.out, "MOTIFDIFF_SAMPLES_OUT", "Samples TSV");
  path(s_smp, "--encoded", smp.encoded, "MOTIFDIFF_ENCODED",
       "Encoded corpus (oracle denoiser)", false);
  path(s_smp, "--trajectories", smp.trajectories, "MOTIFDIFF_TRAJECTORY_OUT",
       "Trajectory dump", false);
  s_smp->add_option("--denoiser", smp.denoiser, "Reference denoiser")
      ->check(CLI::IsMember({ "marginal", "uniform", "oracle" }))
      ->capture_default_str();
  s_smp->add_option("--index", smp.index, "Encoded record for the oracle")
      ->capture_default_str();
  s_smp->add_option("--count", smp.count, "Number of samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_smp->add_option("--n-nodes", smp.n_nodes, "Motif nodes per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_smp->add_option("--T", smp.t_max, "Diffusion steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_smp->add_option("--s", smp.s, "Schedule offset")->capture_default_str();
  s_smp->add_flag("--argmax", smp.argmax, "Use the most likely x0");
  add_common(s_smp);

  TasksArgs tk;
  auto *s_tk = app.add_subcommand("build-tasks",
                                  "Build demonstration-context tasks");
  path(s_tk, "--records", tk.records, "MOTIFDIFF_RECORDS", "Records CSV");
  path(s_tk, "--out", tk.out, "MOTIFDIFF_TASKS_OUT", "Task JSONL");
  path(s_tk, "--vocab", tk.vocab, "MOTIFDIFF_VOCAB",
       "Vocabulary for context packing", false);
  s_tk->add_option("--mode", tk.mode, "Record kind")
      ->check(CLI::IsMember({ "bioassay", "polymer" }))
      ->capture_default_str();
  s_tk->add_option("--anchor-threshold", tk.anchor_threshold,
                   "Minimum anchor value (bioassay)")
      ->capture_default_str();
  s_tk->add_option("--limit-per-group", tk.limit_per_group,
                   "Demonstrations per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_tk->add_option("--budget-tokens", tk.budget_tokens, "Context token budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_tk->add_flag("--random-subset", tk.random_subset,
                 "Sample overflowing groups with --seed");
  add_common(s_tk);

  ConsistencyArgs cons;
  auto *s_cons = app.add_subcommand("consistency",
                                    "Rank candidates by consistency score");
  path(s_cons, "--tasks", cons.tasks, "MOTIFDIFF_TASKS", "Task JSONL");
  path(s_cons, "--candidates", cons.candidates, "MOTIFDIFF_CANDIDATES",
       "Candidate SMILES");
  path(s_cons, "--out", cons.out, "MOTIFDIFF_CONSISTENCY_OUT", "Ranked TSV");
  s_cons->add_option("--task-id", cons.task_id, "Task (default: first)");
  s_cons->add_option("--keep", cons.keep, "Candidates to keep (default all)");
  s_cons->add_option("--radius", cons.radius, "Fingerprint radius")
      ->capture_default_str();
  s_cons->add_option("--width", cons.width, "Fingerprint bits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(s_cons);

  EvaluateArgs ev;
  auto *s_ev = app.add_subcommand("evaluate", "Top-k score and diversity report");
  path(s_ev, "--scored", ev.scored, "MOTIFDIFF_SCORED", "Scored molecules TSV");
  path(s_ev, "--out", ev.out, "MOTIFDIFF_REPORT_OUT", "Report TSV");
  s_ev->add_option("--k", ev.k, "Top-k")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_ev->add_option("--radius", ev.radius, "Fingerprint radius")
      ->capture_default_str();
  s_ev->add_option("--width", ev.width, "Fingerprint bits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_ev->add_option("--int-div-norm", ev.norm,
                   "squared: 1/|G|^2, pairs: 1/(|G|(|G|-1))")
      ->check(CLI::IsMember({ "squared", "pairs" }))
      ->capture_default_str();
  add_common(s_ev);

  RoundtripArgs rt;
  auto *s_rt = app.add_subcommand("roundtrip-check",
                                  "Check decode(encode(g)) == g");
  path(s_rt, "--corpus", rt.corpus, "MOTIFDIFF_CORPUS", "SMILES corpus");
  path(s_rt, "--vocab", rt.vocab, "MOTIFDIFF_VOCAB", "Vocabulary file");
  path(s_rt, "--out", rt.out, "MOTIFDIFF_REPORT_OUT", "Report");
  add_common(s_rt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s_train)
      return run_train(train, common);
    if (*s_enc)
      return run_encode(enc, common);
    if (*s_dec)
      return run_decode(dec, common);
    if (*s_stats)
      return run_stats(stats, common);
    if (*s_marg)
      return run_marginals(marg, common);
    if (*s_dif)
      return run_diffuse(dif, common);
    if (*s_smp)
      return run_sample(smp, common);
    if (*s_tk)
      return run_build_tasks(tk, common);
    if (*s_cons)
      return run_consistency(cons, common);
    if (*s_ev)
      return run_evaluate(ev, common);
    if (*s_rt)
      return run_roundtrip(rt, common);
  } catch (const md::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
