//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Serial reference vs OpenMP kernels. The thread count is the benchmark
// argument; 0 selects the serial reference.

#include <fstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "motifdiff/context.hpp"
#include "motifdiff/kernels.hpp"
#include "motifdiff/metrics.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/smiles.hpp"

using namespace motifdiff;

namespace {

const std::vector<MolecularGraph> &corpus() {
  static const std::vector<MolecularGraph> graphs = [] {
    std::ifstream is(std::string(MOTIFDIFF_DATA_DIR) + "/corpus_10k.smi");
    std::vector<MolecularGraph> out;
    std::string line;
    while (out.size() < 2000 && std::getline(is, line)) {
      line = line.substr(0, line.find_first_of("\t "));
      if (!line.empty())
        out.push_back(parse_smiles(line));
    }
    return out;
  }();
  return graphs;
}

const MotifVocabulary &vocab() {
  static const MotifVocabulary v = train_vocabulary(corpus(), 800, 80);
  return v;
}

const std::vector<Fingerprint> &fingerprints() {
  static const std::vector<Fingerprint> fps = [] {
    std::vector<Fingerprint> out;
    for (const MolecularGraph &g: corpus())
      out.push_back(fingerprint(g));
    return out;
  }();
  return fps;
}

const GroupFingerprints &groups() {
  static const GroupFingerprints g = [] {
    DemoGroups d;
    const std::vector<MolecularGraph> &c = corpus();
    for (int i = 0; i < 15; ++i) {
      d.positive.push_back({ c[i], "", 0.9, canonical_form(c[i]) });
      d.medium.push_back({ c[20 + i], "", 0.6, canonical_form(c[20 + i]) });
      d.negative.push_back({ c[40 + i], "", 0.2, canonical_form(c[40 + i]) });
    }
    return group_fingerprints(d);
  }();
  return g;
}

void threads_arg(benchmark::internal::Benchmark *b) {
  b->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_EncodeAll(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  const auto &c = corpus();
  const auto &v = vocab();
  for (auto _: state) {
    auto out = threads ? kernels::parallel::encode_all(c, v, threads)
                       : kernels::serial::encode_all(c, v);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * c.size());
}
BENCHMARK(BM_EncodeAll)->Apply(threads_arg);

void BM_CandidateCounts(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  const auto &c = corpus();
  const auto &v = vocab();
  for (auto _: state) {
    auto out = threads ? kernels::parallel::candidate_counts(c, v, threads)
                       : kernels::serial::candidate_counts(c, v);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * c.size());
}
BENCHMARK(BM_CandidateCounts)->Apply(threads_arg);

void BM_PairwiseTanimoto(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  const auto &fps = fingerprints();
  for (auto _: state) {
    Eigen::MatrixXd out = threads
                              ? kernels::parallel::pairwise_tanimoto(fps, threads)
                              : kernels::serial::pairwise_tanimoto(fps);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * fps.size() * fps.size() / 2);
}
BENCHMARK(BM_PairwiseTanimoto)->Apply(threads_arg);

void BM_ConsistencyScores(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  const auto &fps = fingerprints();
  const auto &g = groups();
  for (auto _: state) {
    auto out = threads
                   ? kernels::parallel::consistency_scores(fps, g, threads)
                   : kernels::serial::consistency_scores(fps, g);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * fps.size());
}
BENCHMARK(BM_ConsistencyScores)->Apply(threads_arg);

}  // namespace

BENCHMARK_MAIN();
