//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace motifdiff {

// kAromatic only exists between parsing and kekulization; every graph handed
// out by the public parsing API carries single/double/triple orders only.
enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

inline int bond_valence(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct AtomNode {
  int element = 6;
  int formal_charge = 0;
  // Unset for organic-subset atoms written without brackets; their hydrogen
  // count is implied by valence and never materialized.
  std::optional<int> explicit_hydrogens;
  bool aromatic = false;

  friend bool operator==(const AtomNode &, const AtomNode &) = default;
};

struct Bond {
  int src;
  int dst;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == src ? dst : src; }
};

struct Neighbor {
  int atom;
  int bond;
};

class MolecularGraph {
public:
  MolecularGraph() = default;

  int add_atom(const AtomNode &atom);

  // Throws Error(kInvalidArgument) on self-loops, out-of-range endpoints and
  // duplicate bonds.
  int add_bond(int src, int dst, BondOrder order);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }

  const AtomNode &atom(int i) const { return atoms_[i]; }
  AtomNode &atom(int i) { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  void set_bond_order(int i, BondOrder order) { bonds_[i].order = order; }

  const std::vector<AtomNode> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int atom) const { return adj_[atom]; }
  int degree(int atom) const { return static_cast<int>(adj_[atom].size()); }

  // Bond index between a and b, or -1.
  int find_bond(int a, int b) const;

  bool empty() const { return atoms_.empty(); }

private:
  std::vector<AtomNode> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
};

struct RingSystem {
  std::vector<int> atom_indices;  // sorted
  std::vector<int> bond_indices;  // sorted
};

// Sum of bond valences (aromatic counts as 1).
int explicit_valence(const MolecularGraph &g, int atom);

// Implicit hydrogens for atoms without an explicit count: the smallest
// standard valence that accommodates the bonds, minus the bond valence.
// Atoms with an explicit count return 0.
int implicit_hydrogens(const MolecularGraph &g, int atom);

int total_hydrogens(const MolecularGraph &g, int atom);

// True when every atom's bond valence plus hydrogens fits one of its
// (charge-adjusted) standard valences. Elements without a valence table are
// accepted as long as they are not over-bonded by explicit hydrogens alone.
bool valence_ok(const MolecularGraph &g);

bool is_connected(const MolecularGraph &g);

// Graph restricted to `atoms`, renumbered in the given order.
MolecularGraph induced_subgraph(const MolecularGraph &g,
                                std::span<const int> atoms);

// new_index[i] is the position of old atom i in the result.
MolecularGraph permute_atoms(const MolecularGraph &g,
                             std::span<const int> new_index);

// Per-bond flag: bond lies on at least one simple cycle (not a bridge).
std::vector<bool> cycle_bonds(const MolecularGraph &g);

// Fused ring systems: connected components of the cycle-bond subgraph.
// Ordered by smallest atom index.
std::vector<RingSystem> extract_ring_systems(const MolecularGraph &g);

// Canonical rank of every atom (a permutation of 0..n-1). Isomorphic graphs
// receive ranks that induce the same labeled graph.
std::vector<int> canonical_ranks(const MolecularGraph &g);

// Atom indices sorted by canonical rank.
std::vector<int> canonical_order(const MolecularGraph &g);

using CanonicalString = std::string;

CanonicalString canonical_form(const MolecularGraph &g);

// Inverse of canonical_form (atoms come back in canonical order). Throws
// Error(kFormatError).
MolecularGraph graph_from_canonical(const CanonicalString &key);

// Label-preserving isomorphism (same atoms, bonds and bond orders up to
// renumbering).
bool graphs_equal(const MolecularGraph &a, const MolecularGraph &b);

}  // namespace motifdiff
