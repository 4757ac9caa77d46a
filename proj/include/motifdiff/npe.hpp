//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "motifdiff/molgraph.hpp"

namespace motifdiff {

class PairCache;
class MotifGraph;

enum class MotifKind : std::uint8_t {
  kAtom,         // one of the 119 plain atom types
  kAtomVariant,  // single atom with charge or explicit hydrogens
  kRing,         // seeded ring system
  kMerged,       // produced by a merge
};

std::string_view motif_kind_name(MotifKind kind);

struct Motif {
  // Atoms are stored in canonical order: attachment index k refers to
  // graph.atom(k).
  MolecularGraph graph;
  CanonicalString canonical_key;
  MotifKind kind = MotifKind::kAtom;

  int size() const { return graph.num_atoms(); }
};

struct MergeRecord {
  CanonicalString left_key;
  CanonicalString right_key;
  BondOrder bond_order = BondOrder::kSingle;
  CanonicalString result_key;
  int result_id = -1;
  long frequency = 0;
};

// Reorders `g` into canonical order so it can serve as a motif template.
Motif make_motif(const MolecularGraph &g, MotifKind kind);

// Template for the plain atom type (0 = "*", otherwise atomic number).
// Organic-subset atoms have unspecified hydrogens, others carry H0, matching
// what the SMILES parser produces for "C" and "[Na]".
AtomNode plain_atom(int atomic_number);

class MotifVocabulary {
public:
  // The 119 single-atom motifs; motif id == atomic number, "*" is id 0.
  MotifVocabulary();
  // Copies get their own pair cache; cached keys are tied to motif ids.
  MotifVocabulary(const MotifVocabulary &other);
  MotifVocabulary &operator=(const MotifVocabulary &other);
  MotifVocabulary(MotifVocabulary &&) noexcept = default;
  MotifVocabulary &operator=(MotifVocabulary &&) noexcept = default;
  ~MotifVocabulary();

  int size() const { return static_cast<int>(motifs_.size()); }
  const Motif &motif(int id) const { return motifs_.at(id); }
  const std::vector<Motif> &motifs() const { return motifs_; }
  std::optional<int> find(const CanonicalString &key) const;

  // Returns the id of the motif, appending it when new.
  int add(Motif motif);

  const std::vector<MergeRecord> &merges() const { return merges_; }
  void add_merge(MergeRecord rec);

  // Merge positions (training order) that produce `key`, ascending.
  const std::vector<int> *merge_ranks(const CanonicalString &key) const;

  bool is_seed_ring(int id) const {
    return motifs_[id].kind == MotifKind::kRing;
  }

  int max_motif_size() const;

  int k = 0;
  int k_ring = 0;
  int num_seed_rings = 0;
  long min_frequency = 1;
  std::string corpus_hash;

  PairCache &cache() const { return *cache_; }

private:
  std::vector<Motif> motifs_;
  std::unordered_map<CanonicalString, int> index_;
  std::vector<MergeRecord> merges_;
  std::unordered_map<CanonicalString, std::vector<int>> merge_ranks_;
  std::shared_ptr<PairCache> cache_;
};

struct RingCount {
  Motif motif;
  long count;
};

// The k_ring most frequent fused ring systems of the corpus, each molecule
// contributing one count per ring-system instance. Ties: fewer atoms, then
// canonical key.
std::vector<RingCount> seed_rings(const std::vector<MolecularGraph> &corpus,
                                  int k_ring, int threads = 1);

struct TrainOptions {
  int k = 3000;
  int k_ring = 300;
  // Candidates observed fewer times than this end training.
  long min_frequency = 1;
  int threads = 1;
  // Called after each merge with (iteration, vocabulary size, frequency).
  std::function<void(int, int, long)> progress;
};

// One selection step of training, kept for replay checks.
struct TrainTraceEntry {
  CanonicalString selected;
  long frequency;
  // Best competing candidate (frequency, size, key) at selection time.
  std::vector<std::tuple<long, int, CanonicalString>> top_candidates;
};

// Node Pair Encoding with ring constraints. Throws Error(kCorpusEmpty).
MotifVocabulary train_vocabulary(const std::vector<MolecularGraph> &corpus,
                                 const TrainOptions &opts,
                                 std::vector<TrainTraceEntry> *trace = nullptr);

MotifVocabulary train_vocabulary(const std::vector<MolecularGraph> &corpus,
                                 int k, int k_ring);

struct EdgeSignature {
  int source_motif;
  int target_motif;
  BondOrder bond_order;
  int attachment;

  auto operator<=>(const EdgeSignature &) const = default;
};

struct EdgeVocabulary {
  std::set<EdgeSignature> entries;

  bool contains(const EdgeSignature &e) const { return entries.contains(e); }
};

EdgeVocabulary build_edge_vocabulary(const std::vector<MotifGraph> &encoded);

// FNV-1a over the corpus lines, hex encoded.
std::string corpus_hash(const std::vector<std::string> &lines);

// Versioned JSON persistence. Motifs are stored as SMILES together with the
// SMILES-position to template-index map, so reloading reproduces ids and
// attachment indices exactly.
void save_vocabulary(const MotifVocabulary &v, std::ostream &os);
MotifVocabulary load_vocabulary(std::istream &is);

inline constexpr int kVocabFormatVersion = 1;

}  // namespace motifdiff
