//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/npe.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/tokenizer.hpp"
#include "motifdiff/parallel.hpp"
#include "segmentation.hpp"

namespace motifdiff {

std::string_view motif_kind_name(MotifKind kind) {
  switch (kind) {
  case MotifKind::kAtom:
    return "atom";
  case MotifKind::kAtomVariant:
    return "atom_variant";
  case MotifKind::kRing:
    return "ring";
  case MotifKind::kMerged:
    return "merged";
  }
  return "unknown";
}

Motif make_motif(const MolecularGraph &g, MotifKind kind) {
  std::vector<int> ord = canonical_order(g);
  Motif m;
  m.graph = induced_subgraph(g, ord);
  m.canonical_key = canonical_form(g);
  m.kind = kind;
  return m;
}

AtomNode plain_atom(int atomic_number) {
  AtomNode a;
  a.element = atomic_number;
  if (!is_organic_subset(atomic_number))
    a.explicit_hydrogens = 0;
  return a;
}

// --- MotifVocabulary ---

MotifVocabulary::MotifVocabulary(): cache_(std::make_shared<PairCache>()) {
  for (int z = 0; z < kNumAtomTypes; ++z) {
    MolecularGraph g;
    g.add_atom(plain_atom(z));
    add(make_motif(g, MotifKind::kAtom));
  }
}

MotifVocabulary::MotifVocabulary(const MotifVocabulary &other)
    : k(other.k), k_ring(other.k_ring), num_seed_rings(other.num_seed_rings),
      min_frequency(other.min_frequency), corpus_hash(other.corpus_hash),
      motifs_(other.motifs_), index_(other.index_), merges_(other.merges_),
      merge_ranks_(other.merge_ranks_),
      cache_(std::make_shared<PairCache>()) { }

MotifVocabulary &MotifVocabulary::operator=(const MotifVocabulary &other) {
  if (this != &other) {
    MotifVocabulary tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

MotifVocabulary::~MotifVocabulary() = default;

std::optional<int> MotifVocabulary::find(const CanonicalString &key) const {
  auto it = index_.find(key);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

int MotifVocabulary::add(Motif motif) {
  if (auto id = find(motif.canonical_key))
    return *id;
  int id = size();
  index_.emplace(motif.canonical_key, id);
  motifs_.push_back(std::move(motif));
  return id;
}

void MotifVocabulary::add_merge(MergeRecord rec) {
  merge_ranks_[rec.result_key].push_back(static_cast<int>(merges_.size()));
  merges_.push_back(std::move(rec));
}

const std::vector<int> *
MotifVocabulary::merge_ranks(const CanonicalString &key) const {
  auto it = merge_ranks_.find(key);
  return it == merge_ranks_.end() ? nullptr : &it->second;
}

int MotifVocabulary::max_motif_size() const {
  int best = 0;
  for (const Motif &m: motifs_)
    best = std::max(best, m.size());
  return best;
}

// --- ring seeding ---

std::vector<RingCount> seed_rings(const std::vector<MolecularGraph> &corpus,
                                  int k_ring, int threads) {
  if (k_ring < 0)
    throw Error(ErrorKind::kInvalidArgument, "k_ring must be non-negative");
  if (k_ring == 0)
    return {};

  std::vector<std::vector<CanonicalString>> keys(corpus.size());
  detail::parallel_for(
      static_cast<std::ptrdiff_t>(corpus.size()), threads, [&](auto i) {
        for (const RingSystem &sys: extract_ring_systems(corpus[i]))
          keys[i].push_back(
              canonical_form(induced_subgraph(corpus[i], sys.atom_indices)));
      });

  struct Entry {
    long count = 0;
    std::size_t mol = 0;
    std::size_t sys = 0;
  };
  std::map<CanonicalString, Entry> counts;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t s = 0; s < keys[i].size(); ++s) {
      auto [it, fresh] = counts.try_emplace(keys[i][s]);
      if (fresh) {
        it->second.mol = i;
        it->second.sys = s;
      }
      ++it->second.count;
    }
  }

  std::vector<RingCount> out;
  out.reserve(counts.size());
  for (const auto &[key, e]: counts) {
    auto systems = extract_ring_systems(corpus[e.mol]);
    Motif m = make_motif(
        induced_subgraph(corpus[e.mol], systems[e.sys].atom_indices),
        MotifKind::kRing);
    out.push_back({ std::move(m), e.count });
  }
  std::sort(out.begin(), out.end(), [](const RingCount &a, const RingCount &b) {
    if (a.count != b.count)
      return a.count > b.count;
    if (a.motif.size() != b.motif.size())
      return a.motif.size() < b.motif.size();
    return a.motif.canonical_key < b.motif.canonical_key;
  });
  if (static_cast<int>(out.size()) > k_ring)
    out.resize(k_ring);
  return out;
}

// --- training ---

namespace {
// Decorated atoms outside seeded ring systems, ordered by frequency.
std::vector<Motif> collect_atom_variants(
    const std::vector<MolecularGraph> &corpus,
    const std::unordered_set<CanonicalString> &seeded, int threads) {
  std::vector<std::vector<std::pair<CanonicalString, AtomNode>>> found(
      corpus.size());
  detail::parallel_for(
      static_cast<std::ptrdiff_t>(corpus.size()), threads, [&](auto i) {
        const MolecularGraph &g = corpus[i];
        std::vector<bool> in_seed(g.num_atoms(), false);
        for (const RingSystem &sys: extract_ring_systems(g)) {
          if (seeded.contains(
                  canonical_form(induced_subgraph(g, sys.atom_indices))))
            for (int a: sys.atom_indices)
              in_seed[a] = true;
        }
        for (int a = 0; a < g.num_atoms(); ++a) {
          const AtomNode &atom = g.atom(a);
          if (in_seed[a])
            continue;
          if (atom.element >= 0 && atom.element < kNumAtomTypes &&
              atom == plain_atom(atom.element))
            continue;
          found[i].emplace_back(detail::single_atom_key(atom), atom);
        }
      });

  std::map<CanonicalString, std::pair<long, AtomNode>> counts;
  for (const auto &mol: found) {
    for (const auto &[key, atom]: mol) {
      auto &slot = counts[key];
      slot.first++;
      slot.second = atom;
    }
  }
  std::vector<std::pair<long, CanonicalString>> order;
  for (const auto &[key, slot]: counts)
    order.emplace_back(slot.first, key);
  std::sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
    if (a.first != b.first)
      return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Motif> out;
  for (const auto &[count, key]: order) {
    MolecularGraph g;
    g.add_atom(counts[key].second);
    out.push_back(make_motif(g, MotifKind::kAtomVariant));
  }
  return out;
}

struct Candidate {
  long count;
  int size;
  int key;
};

class Trainer {
public:
  Trainer(const std::vector<MolecularGraph> &corpus, MotifVocabulary &v,
          int threads)
      : corpus_(corpus), v_(v), cache_(v.cache()), threads_(threads),
        ranking_(CandidateLess{ &cache_ }) { }

  void init() {
    segs_.reserve(corpus_.size());
    for (const MolecularGraph &g: corpus_)
      segs_.emplace_back(g, v_);
    occs_.resize(corpus_.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(segs_.size()), threads_,
                         [&](auto i) { segs_[i].occurrences(cache_, occs_[i]); });
    for (std::size_t m = 0; m < segs_.size(); ++m)
      add_counts(static_cast<int>(m), +1);
    flush();
  }

  bool best(Candidate &out) const {
    if (ranking_.empty())
      return false;
    out = *ranking_.begin();
    return true;
  }

  std::vector<std::tuple<long, int, CanonicalString>> top(int skip,
                                                          int n) const {
    std::vector<std::tuple<long, int, CanonicalString>> out;
    for (auto it = ranking_.begin(); it != ranking_.end() && n > 0; ++it) {
      if (skip-- > 0)
        continue;
      out.emplace_back(it->count, it->size, cache_.key(it->key));
      --n;
    }
    return out;
  }

  // Rewrites every molecule containing `key`; returns the merge record of
  // the lowest-index molecule's first occurrence.
  MergeRecord merge(const Candidate &cand) {
    const int key = cand.key;
    std::vector<int> mols;
    for (const auto &[m, c]: key_mols_[key])
      mols.push_back(m);
    std::sort(mols.begin(), mols.end());

    const int m0 = mols.front();
    const detail::Occurrence *first = nullptr;
    for (const detail::Occurrence &o: occs_[m0]) {
      if (o.key != key)
        continue;
      if (!first || std::pair(o.rank_lo, o.rank_hi) <
                        std::pair(first->rank_lo, first->rank_hi))
        first = &o;
    }
    const detail::Segmentation &s0 = segs_[m0];
    MergeRecord rec;
    rec.left_key = s0.unit_key(first->unit_a, v_, cache_);
    rec.right_key = s0.unit_key(first->unit_b, v_, cache_);
    rec.bond_order = first->order;
    rec.result_key = cache_.key(key);
    rec.frequency = cand.count;

    int id;
    if (auto existing = v_.find(rec.result_key)) {
      id = *existing;
    } else {
      std::vector<int> atoms = s0.unit_atoms(first->unit_a);
      std::vector<int> more = s0.unit_atoms(first->unit_b);
      atoms.insert(atoms.end(), more.begin(), more.end());
      id = v_.add(make_motif(induced_subgraph(s0.graph(), atoms),
                             MotifKind::kMerged));
    }
    rec.result_id = id;
    const Motif &tmpl = v_.motif(id);

    for (int m: mols)
      add_counts(m, -1);
    detail::parallel_for(static_cast<std::ptrdiff_t>(mols.size()), threads_,
                         [&](auto i) {
                           int m = mols[i];
                           segs_[m].apply(key, occs_[m], tmpl, id);
                           segs_[m].occurrences(cache_, occs_[m]);
                         });
    for (int m: mols)
      add_counts(m, +1);
    flush();
    return rec;
  }

private:
  struct CandidateLess {
    const PairCache *cache;
    bool operator()(const Candidate &a, const Candidate &b) const {
      if (a.count != b.count)
        return a.count > b.count;
      if (a.size != b.size)
        return a.size < b.size;
      if (a.key == b.key)
        return false;
      return cache->key(a.key) < cache->key(b.key);
    }
  };

  void touch(int key) {
    if (static_cast<int>(counts_.size()) <= key) {
      counts_.resize(key + 1, 0);
      key_mols_.resize(key + 1);
      dirty_flag_.resize(key + 1, false);
    }
    if (!dirty_flag_[key]) {
      dirty_flag_[key] = true;
      dirty_.push_back(key);
      if (counts_[key] > 0)
        ranking_.erase({ counts_[key], cache_.key_size(key), key });
    }
  }

  void add_counts(int m, int sign) {
    for (const detail::Occurrence &o: occs_[m]) {
      touch(o.key);
      counts_[o.key] += sign;
      int &c = key_mols_[o.key][m];
      c += sign;
      if (c == 0)
        key_mols_[o.key].erase(m);
    }
  }

  void flush() {
    for (int key: dirty_) {
      dirty_flag_[key] = false;
      if (counts_[key] > 0)
        ranking_.insert({ counts_[key], cache_.key_size(key), key });
    }
    dirty_.clear();
  }

  const std::vector<MolecularGraph> &corpus_;
  MotifVocabulary &v_;
  PairCache &cache_;
  int threads_;
  std::vector<detail::Segmentation> segs_;
  std::vector<std::vector<detail::Occurrence>> occs_;
  std::vector<long> counts_;
  std::vector<std::unordered_map<int, int>> key_mols_;
  std::vector<bool> dirty_flag_;
  std::vector<int> dirty_;
  std::set<Candidate, CandidateLess> ranking_;
};
}  // namespace

MotifVocabulary train_vocabulary(const std::vector<MolecularGraph> &corpus,
                                 const TrainOptions &opts,
                                 std::vector<TrainTraceEntry> *trace) {
  if (corpus.empty())
    throw Error(ErrorKind::kCorpusEmpty, "training corpus is empty");
  if (opts.min_frequency < 1)
    throw Error(ErrorKind::kInvalidArgument, "min_frequency must be >= 1");
  for (const MolecularGraph &g: corpus) {
    if (!is_connected(g))
      throw Error(ErrorKind::kDisconnectedInput,
                  "training molecules must be connected");
  }

  MotifVocabulary v;
  v.k = opts.k;
  v.k_ring = opts.k_ring;
  v.min_frequency = opts.min_frequency;

  std::unordered_set<CanonicalString> seeded;
  for (RingCount &rc: seed_rings(corpus, opts.k_ring, opts.threads)) {
    seeded.insert(rc.motif.canonical_key);
    v.add(std::move(rc.motif));
    ++v.num_seed_rings;
  }
  if (opts.k < v.size())
    throw Error(ErrorKind::kInvalidArgument,
                "k is smaller than the atom and seeded ring vocabulary");
  for (Motif &m: collect_atom_variants(corpus, seeded, opts.threads))
    v.add(std::move(m));

  Trainer trainer(corpus, v, opts.threads);
  trainer.init();
  int iteration = 0;
  Candidate cand;
  while (v.size() < opts.k && trainer.best(cand) &&
         cand.count >= opts.min_frequency) {
    std::vector<std::tuple<long, int, CanonicalString>> competitors;
    if (trace)
      competitors = trainer.top(1, 3);
    MergeRecord rec = trainer.merge(cand);
    if (trace)
      trace->push_back({ rec.result_key, rec.frequency, std::move(competitors) });
    v.add_merge(std::move(rec));
    ++iteration;
    if (opts.progress)
      opts.progress(iteration, v.size(), cand.count);
  }
  return v;
}

MotifVocabulary train_vocabulary(const std::vector<MolecularGraph> &corpus,
                                 int k, int k_ring) {
  TrainOptions opts;
  opts.k = k;
  opts.k_ring = k_ring;
  return train_vocabulary(corpus, opts);
}

// --- edge vocabulary / hashing ---

EdgeVocabulary build_edge_vocabulary(const std::vector<MotifGraph> &encoded) {
  EdgeVocabulary ev;
  for (const MotifGraph &h: encoded) {
    for (const DirectedEdge &e: h.edges)
      ev.entries.insert(
          { h.nodes[e.source], h.nodes[e.target], e.bond_order, e.attachment });
  }
  return ev;
}

std::string corpus_hash(const std::vector<std::string> &lines) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::string &line: lines) {
    for (unsigned char c: line) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace motifdiff
