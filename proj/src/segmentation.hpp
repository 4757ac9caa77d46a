//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Per-molecule motif segmentation shared by training and encoding.

#pragma once

#include <compare>
#include <cstddef>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "motifdiff/molgraph.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/tokenizer.hpp"

namespace motifdiff {
namespace detail {
struct UnitSig {
  int kind;  // 0 = motif instance, 1 = unseeded ring system
  int id;
  int pos;

  auto operator<=>(const UnitSig &) const = default;
};

struct PairSig {
  UnitSig a, b;
  int order;

  bool operator==(const PairSig &) const = default;
};

struct PairSigHash {
  std::size_t operator()(const PairSig &p) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    auto mix = [&h](int v) {
      h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
      h *= 1099511628211ULL;
    };
    mix(p.a.kind);
    mix(p.a.id);
    mix(p.a.pos);
    mix(p.b.kind);
    mix(p.b.id);
    mix(p.b.pos);
    mix(p.order);
    return h;
  }
};

// Template-order mapping: result[k] is the atom of `g` playing template
// atom k. Returns empty if `atoms` does not induce a copy of `tmpl`.
std::vector<int> map_to_template(const MolecularGraph &tmpl,
                                 const MolecularGraph &g,
                                 std::span<const int> atoms);

CanonicalString single_atom_key(const AtomNode &atom);
}  // namespace detail

// Thread-safe memo of merged-pair keys and unseeded ring templates. Key ids
// are process-local and never leave the library.
class PairCache {
public:
  std::optional<int> find(const detail::PairSig &sig) const;
  int insert(const detail::PairSig &sig, CanonicalString key, int size);

  // Registers a ring template (first occurrence wins) and returns its id.
  int ring_id(const CanonicalString &key, const MolecularGraph &fragment);
  const MolecularGraph &ring_template(int id) const;
  const CanonicalString &ring_key(int id) const;

  const CanonicalString &key(int id) const;
  int key_size(int id) const;
  int num_keys() const;

private:
  int intern(CanonicalString key, int size);

  mutable std::shared_mutex mu_;
  std::unordered_map<detail::PairSig, int, detail::PairSigHash> pairs_;
  std::deque<CanonicalString> keys_;
  std::deque<int> sizes_;
  std::unordered_map<CanonicalString, int> key_ids_;
  std::deque<CanonicalString> ring_keys_;
  std::deque<MolecularGraph> ring_templates_;
  std::unordered_map<CanonicalString, int> ring_ids_;
};

namespace detail {
struct Occurrence {
  int atom_a, atom_b;
  int unit_a, unit_b;
  BondOrder order;
  int key;
  int rank_lo, rank_hi;
};

class Segmentation {
public:
  // Seeded ring systems collapse into their ring motif; other ring systems
  // stay atom-level and may only be merged as a whole. Throws
  // Error(kUnknownAtomVariant) for decorated atoms missing from `v`.
  Segmentation(const MolecularGraph &g, const MotifVocabulary &v);

  void occurrences(PairCache &cache, std::vector<Occurrence> &out) const;

  // Greedily merges non-overlapping occurrences of `key` in canonical atom
  // order. Returns the number of merges applied.
  int apply(int key, std::span<const Occurrence> occs, const Motif &tmpl,
            int motif_id);

  int num_nodes() const { return alive_; }
  const MolecularGraph &graph() const { return *g_; }

  std::vector<int> unit_atoms(int unit) const;
  CanonicalString unit_key(int unit, const MotifVocabulary &v,
                           const PairCache &cache) const;

  MotifGraph to_motif_graph() const;

private:
  struct Instance {
    int motif;
    std::vector<int> atoms;  // template order
    bool alive;
  };
  struct Ring {
    std::vector<int> atoms;  // template order
    int key;
    bool collapsed;
  };

  int unit_of(int atom) const;
  UnitSig sig_of(int unit, int atom) const;
  void place(int motif, std::vector<int> atoms);

  std::vector<int> by_rank(std::vector<int> atoms) const;

  const MolecularGraph *g_;
  std::vector<int> ranks_;
  std::vector<Instance> inst_;
  std::vector<int> atom_inst_, atom_pos_;
  std::vector<Ring> rings_;
  std::vector<int> atom_ring_, atom_ring_pos_;
  int alive_ = 0;
};

// Applies the vocabulary's merges in training order.
void replay(Segmentation &seg, const MotifVocabulary &v);
}  // namespace detail
}  // namespace motifdiff
