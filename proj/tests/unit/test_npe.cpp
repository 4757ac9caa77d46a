//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <sstream>

#include <gtest/gtest.h>

#include "motifdiff/error.hpp"
#include "motifdiff/kernels.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/smiles.hpp"
#include "motifdiff/tokenizer.hpp"
#include "test_util.hpp"

namespace motifdiff {
namespace {

ErrorKind train_error(const std::vector<MolecularGraph> &corpus, int k,
                      int k_ring, long min_frequency = 1) {
  TrainOptions opts;
  opts.k = k;
  opts.k_ring = k_ring;
  opts.min_frequency = min_frequency;
  try {
    train_vocabulary(corpus, opts);
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "training succeeded";
  return ErrorKind::kInvalidArgument;
}

TEST(Vocabulary, StartsWithAtoms) {
  MotifVocabulary v;
  EXPECT_EQ(v.size(), 119);
  EXPECT_EQ(v.motif(6).graph.atom(0).element, 6);
  EXPECT_EQ(v.motif(0).graph.atom(0).element, 0);
  EXPECT_EQ(v.find(canonical_form(parse_smiles("N"))), 7);
  EXPECT_EQ(v.motif(6).kind, MotifKind::kAtom);
}

TEST(Npe, PropaneTrace) {
  std::vector<MolecularGraph> corpus{ parse_smiles("CCC") };
  std::vector<TrainTraceEntry> trace;
  TrainOptions opts;
  opts.k = 121;
  opts.k_ring = 0;
  MotifVocabulary v = train_vocabulary(corpus, opts, &trace);
  ASSERT_EQ(v.merges().size(), 2U);
  EXPECT_EQ(v.merges()[0].result_key, canonical_form(parse_smiles("CC")));
  EXPECT_EQ(v.merges()[0].frequency, 2);
  EXPECT_EQ(v.merges()[1].result_key, canonical_form(parse_smiles("CCC")));
  EXPECT_EQ(v.merges()[1].frequency, 1);
  ASSERT_EQ(trace.size(), 2U);
  EXPECT_EQ(trace[0].frequency, 2);
  EXPECT_EQ(v.size(), 121);

  MotifGraph h = encode(corpus[0], v);
  ASSERT_EQ(h.num_nodes(), 1);
  EXPECT_EQ(h.nodes[0], 120);
  EXPECT_TRUE(h.edges.empty());
}

TEST(Npe, MinFrequencyStopsTraining) {
  std::vector<MolecularGraph> corpus{ parse_smiles("CCC") };
  TrainOptions opts;
  opts.k = 121;
  opts.k_ring = 0;
  opts.min_frequency = 2;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  EXPECT_EQ(v.merges().size(), 1U);
  EXPECT_EQ(v.size(), 120);
  EXPECT_EQ(encode(corpus[0], v).num_nodes(), 2);
}

TEST(Npe, TieBreakByKey) {
  std::vector<MolecularGraph> corpus{ parse_smiles("CO"), parse_smiles("CN") };
  TrainOptions opts;
  opts.k = 120;
  opts.k_ring = 0;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  ASSERT_EQ(v.merges().size(), 1U);
  CanonicalString co = canonical_form(corpus[0]);
  CanonicalString cn = canonical_form(corpus[1]);
  EXPECT_EQ(v.merges()[0].result_key, std::min(co, cn));
}

TEST(Npe, TieBreakPrefersSmallerFragments) {
  // C-C occurs twice in the first molecule and once as part of a larger
  // fragment; counts decide first.
  std::vector<MolecularGraph> corpus{ parse_smiles("CCCC") };
  TrainOptions opts;
  opts.k = 120;
  opts.k_ring = 0;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  EXPECT_EQ(v.merges()[0].result_key, canonical_form(parse_smiles("CC")));
  EXPECT_EQ(v.merges()[0].frequency, 3);
}

TEST(Npe, TrainingErrors) {
  EXPECT_EQ(train_error({}, 200, 0), ErrorKind::kCorpusEmpty);
  MolecularGraph split;
  split.add_atom({});
  split.add_atom({});
  EXPECT_EQ(train_error({ split }, 200, 0), ErrorKind::kDisconnectedInput);
  EXPECT_EQ(train_error({ parse_smiles("CC") }, 100, 0),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(train_error({ parse_smiles("CC") }, 200, 0, 0),
            ErrorKind::kInvalidArgument);
}

TEST(Npe, SeedRings) {
  std::vector<MolecularGraph> corpus{
    parse_smiles("Cc1ccccc1"), parse_smiles("CCc1ccccc1"),
    parse_smiles("C1CC1C"), parse_smiles("c1ccc2ccccc2c1")
  };
  std::vector<RingCount> rings = seed_rings(corpus, 2);
  ASSERT_EQ(rings.size(), 2U);
  EXPECT_EQ(rings[0].motif.canonical_key,
            canonical_form(parse_smiles("c1ccccc1")));
  EXPECT_EQ(rings[0].count, 2);
  // Ties on count go to the smaller ring system.
  EXPECT_EQ(rings[1].motif.canonical_key,
            canonical_form(parse_smiles("C1CC1")));

  TrainOptions opts;
  opts.k = 125;
  opts.k_ring = 2;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  EXPECT_EQ(v.num_seed_rings, 2);
  auto benzene = v.find(canonical_form(parse_smiles("c1ccccc1")));
  ASSERT_TRUE(benzene);
  EXPECT_TRUE(v.is_seed_ring(*benzene));
  EXPECT_EQ(v.motif(*benzene).kind, MotifKind::kRing);
}

TEST(Npe, RingsStayWhole) {
  // No learned motif may contain part of a ring system without all of it.
  // A ring system that never merged stays as single atoms, so a cyclic bond
  // may only cross motifs between two single-atom motifs.
  std::vector<MolecularGraph> corpus = test::corpus(500);
  TrainOptions opts;
  opts.k = 400;
  opts.k_ring = 10;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  for (const MolecularGraph &g: corpus) {
    MotifGraph h = encode(g, v);
    MolecularGraph back = decode(h, v);
    std::vector<bool> cyc = cycle_bonds(back);
    int offset = 0;
    std::vector<int> start;
    for (int id: h.nodes) {
      start.push_back(offset);
      offset += v.motif(id).size();
    }
    for (const DirectedEdge &e: h.edges) {
      int a = start[e.source] + e.attachment;
      int b = -1;
      for (const DirectedEdge &r: h.edges)
        if (r.source == e.target && r.target == e.source)
          b = start[r.source] + r.attachment;
      ASSERT_GE(b, 0);
      int bond = back.find_bond(a, b);
      ASSERT_GE(bond, 0);
      if (cyc[bond]) {
        EXPECT_EQ(v.motif(h.nodes[e.source]).size(), 1) << write_smiles(g);
        EXPECT_EQ(v.motif(h.nodes[e.target]).size(), 1) << write_smiles(g);
      }
    }
  }
}

TEST(Npe, AtomVariants) {
  std::vector<MolecularGraph> corpus{ parse_smiles("C[N+](C)(C)C"),
                                      parse_smiles("CC(=O)[O-]") };
  TrainOptions opts;
  opts.k = 125;
  opts.k_ring = 0;
  MotifVocabulary v = train_vocabulary(corpus, opts);
  EXPECT_TRUE(v.find(canonical_form(parse_smiles("[N+]"))) ||
              v.find(canonical_form(parse_smiles("[O-]"))));
  for (const MolecularGraph &g: corpus)
    EXPECT_TRUE(graphs_equal(decode(encode(g, v), v), g));
  try {
    encode(parse_smiles("C[S+](C)C"), v);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownAtomVariant);
  }
}

// Each recorded merge is the best candidate (count desc, size asc, key asc)
// of the corpus re-encoded with the vocabulary trained up to that point.
TEST(Npe, TraceReplaysFromCandidateCounts) {
  std::vector<MolecularGraph> corpus = test::corpus(150);
  TrainOptions full_opts;
  full_opts.k_ring = 5;
  full_opts.k = 119 + 5 + 60;
  std::vector<TrainTraceEntry> trace;
  MotifVocabulary full = train_vocabulary(corpus, full_opts, &trace);
  for (int k = 119 + 5 + 1; k < full_opts.k; k += 7) {
    TrainOptions opts = full_opts;
    opts.k = k;
    MotifVocabulary prefix = train_vocabulary(corpus, opts);
    const std::size_t m = prefix.merges().size();
    ASSERT_LT(m, full.merges().size());
    for (std::size_t i = 0; i < m; ++i)
      ASSERT_EQ(prefix.merges()[i].result_key, full.merges()[i].result_key);

    std::map<CanonicalString, long> counts = candidate_counts(corpus, prefix);
    const CanonicalString *best = nullptr;
    long best_count = 0;
    int best_size = 0;
    for (const auto &[key, count]: counts) {
      int size = graph_from_canonical(key).num_atoms();
      if (!best || count > best_count ||
          (count == best_count && size < best_size)) {
        best = &key;
        best_count = count;
        best_size = size;
      }
    }
    ASSERT_TRUE(best);
    EXPECT_EQ(*best, trace[m].selected) << "merge " << m;
    EXPECT_EQ(best_count, trace[m].frequency) << "merge " << m;
  }
}

TEST(Npe, SaveLoadRoundTrip) {
  std::vector<MolecularGraph> corpus = test::corpus(300);
  MotifVocabulary v = train_vocabulary(corpus, 400, 20);
  v.corpus_hash = corpus_hash(test::corpus_lines(300));
  std::ostringstream first;
  save_vocabulary(v, first);
  std::istringstream in(first.str());
  MotifVocabulary loaded = load_vocabulary(in);
  std::ostringstream second;
  save_vocabulary(loaded, second);
  EXPECT_EQ(first.str(), second.str());
  ASSERT_EQ(loaded.size(), v.size());
  for (int id = 0; id < v.size(); ++id)
    ASSERT_EQ(loaded.motif(id).canonical_key, v.motif(id).canonical_key);
  for (const MolecularGraph &g: corpus)
    ASSERT_EQ(encode(g, loaded), encode(g, v));

  std::istringstream bad("{\"format\": \"something else\"}");
  EXPECT_THROW(load_vocabulary(bad), Error);
}

TEST(Npe, CopiesEncodeIdentically) {
  std::vector<MolecularGraph> corpus = test::corpus(100);
  MotifVocabulary v = train_vocabulary(corpus, 250, 10);
  MotifVocabulary copy = v;
  for (const MolecularGraph &g: corpus)
    ASSERT_EQ(encode(g, copy), encode(g, v));
}

TEST(Npe, CorpusHash) {
  std::vector<std::string> a{ "CC", "CO" };
  std::vector<std::string> b{ "CO", "CC" };
  EXPECT_EQ(corpus_hash(a), corpus_hash(a));
  EXPECT_NE(corpus_hash(a), corpus_hash(b));
  EXPECT_EQ(corpus_hash(a).size(), 16U);
}

TEST(Npe, EdgeVocabulary) {
  std::vector<MolecularGraph> corpus = test::corpus(100);
  MotifVocabulary v = train_vocabulary(corpus, 250, 10);
  std::vector<MotifGraph> enc = encode_all(corpus, v);
  EdgeVocabulary ev = build_edge_vocabulary(enc);
  for (const MotifGraph &h: enc)
    for (const DirectedEdge &e: h.edges)
      EXPECT_TRUE(ev.contains({ h.nodes[e.source], h.nodes[e.target],
                                e.bond_order, e.attachment }));
}

TEST(Npe, ThreadCountDoesNotChangeVocabulary) {
  std::vector<MolecularGraph> corpus = test::corpus(400);
  TrainOptions opts;
  opts.k = 500;
  opts.k_ring = 30;
  MotifVocabulary a = train_vocabulary(corpus, opts);
  opts.threads = 4;
  MotifVocabulary b = train_vocabulary(corpus, opts);
  std::ostringstream sa, sb;
  save_vocabulary(a, sa);
  save_vocabulary(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

}  // namespace
}  // namespace motifdiff
