//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/molgraph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"

namespace motifdiff {

int MolecularGraph::add_atom(const AtomNode &atom) {
  if (atom.element < 0 || atom.element > kNumElements)
    throw Error(ErrorKind::kInvalidArgument, "invalid element");
  if (atom.explicit_hydrogens && *atom.explicit_hydrogens < 0)
    throw Error(ErrorKind::kInvalidArgument, "negative hydrogen count");
  atoms_.push_back(atom);
  adj_.emplace_back();
  return num_atoms() - 1;
}

int MolecularGraph::add_bond(int src, int dst, BondOrder order) {
  if (src == dst)
    throw Error(ErrorKind::kInvalidArgument, "self-loop bond");
  if (src < 0 || dst < 0 || src >= num_atoms() || dst >= num_atoms())
    throw Error(ErrorKind::kInvalidArgument, "bond endpoint out of range");
  if (find_bond(src, dst) >= 0)
    throw Error(ErrorKind::kInvalidArgument, "duplicate bond");
  int idx = num_bonds();
  bonds_.push_back({ src, dst, order });
  adj_[src].push_back({ dst, idx });
  adj_[dst].push_back({ src, idx });
  return idx;
}

int MolecularGraph::find_bond(int a, int b) const {
  if (adj_[a].size() > adj_[b].size())
    std::swap(a, b);
  for (const Neighbor &nb: adj_[a])
    if (nb.atom == b)
      return nb.bond;
  return -1;
}

int explicit_valence(const MolecularGraph &g, int atom) {
  int sum = 0;
  for (const Neighbor &nb: g.neighbors(atom))
    sum += bond_valence(g.bond(nb.bond).order);
  return sum;
}

int implicit_hydrogens(const MolecularGraph &g, int atom) {
  const AtomNode &a = g.atom(atom);
  if (a.explicit_hydrogens)
    return 0;
  int used = explicit_valence(g, atom);
  // Aromatic atoms need one more unit for the pi bond until kekulized.
  if (a.aromatic)
    ++used;
  for (int v: default_valences(a.element)) {
    int cv = charged_valence(a.element, v, a.formal_charge);
    if (cv >= used)
      return cv - used;
  }
  return 0;
}

int total_hydrogens(const MolecularGraph &g, int atom) {
  const AtomNode &a = g.atom(atom);
  return a.explicit_hydrogens.value_or(0) + implicit_hydrogens(g, atom);
}

bool valence_ok(const MolecularGraph &g) {
  for (int i = 0; i < g.num_atoms(); ++i) {
    const AtomNode &a = g.atom(i);
    auto vals = default_valences(a.element);
    if (vals.empty())
      continue;
    int used = explicit_valence(g, i) + a.explicit_hydrogens.value_or(0);
    int max_valence = charged_valence(a.element, vals.back(), a.formal_charge);
    if (used > max_valence)
      return false;
  }
  return true;
}

bool is_connected(const MolecularGraph &g) {
  if (g.num_atoms() <= 1)
    return true;
  std::vector<bool> seen(g.num_atoms(), false);
  std::vector<int> stack = { 0 };
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const Neighbor &nb: g.neighbors(u)) {
      if (!seen[nb.atom]) {
        seen[nb.atom] = true;
        ++count;
        stack.push_back(nb.atom);
      }
    }
  }
  return count == g.num_atoms();
}

MolecularGraph induced_subgraph(const MolecularGraph &g,
                                std::span<const int> atoms) {
  std::vector<int> local(g.num_atoms(), -1);
  MolecularGraph sub;
  for (int a: atoms) {
    local[a] = sub.add_atom(g.atom(a));
  }
  // Bonds in a fixed order (by local endpoints) so the result is a
  // deterministic function of the atom order.
  for (int a: atoms) {
    for (const Neighbor &nb: g.neighbors(a)) {
      int la = local[a], lb = local[nb.atom];
      if (lb < 0 || la > lb)
        continue;
      sub.add_bond(la, lb, g.bond(nb.bond).order);
    }
  }
  return sub;
}

MolecularGraph permute_atoms(const MolecularGraph &g,
                             std::span<const int> new_index) {
  std::vector<int> order(g.num_atoms());
  for (int i = 0; i < g.num_atoms(); ++i)
    order[new_index[i]] = i;
  MolecularGraph out;
  for (int old: order)
    out.add_atom(g.atom(old));
  for (const Bond &b: g.bonds())
    out.add_bond(new_index[b.src], new_index[b.dst], b.order);
  return out;
}

std::vector<bool> cycle_bonds(const MolecularGraph &g) {
  const int n = g.num_atoms();
  std::vector<bool> on_cycle(g.num_bonds(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  // Iterative Tarjan bridge search.
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0)
      continue;
    std::vector<Frame> stack = { { root, -1, 0 } };
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      auto nbrs = g.neighbors(f.atom);
      if (f.next < nbrs.size()) {
        Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond)
          continue;
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({ nb.atom, nb.bond, 0 });
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame &parent = stack.back();
          low[parent.atom] = std::min(low[parent.atom], low[done.atom]);
          if (low[done.atom] > disc[parent.atom])
            on_cycle[done.parent_bond] = false;
        }
      }
    }
  }
  return on_cycle;
}

std::vector<RingSystem> extract_ring_systems(const MolecularGraph &g) {
  std::vector<bool> ring_bond = cycle_bonds(g);
  std::vector<int> comp(g.num_atoms(), -1);
  std::vector<RingSystem> systems;

  for (int start = 0; start < g.num_atoms(); ++start) {
    if (comp[start] >= 0)
      continue;
    bool has_ring_bond = false;
    for (const Neighbor &nb: g.neighbors(start))
      has_ring_bond = has_ring_bond || ring_bond[nb.bond];
    if (!has_ring_bond)
      continue;

    RingSystem sys;
    int id = static_cast<int>(systems.size());
    std::vector<int> stack = { start };
    comp[start] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      sys.atom_indices.push_back(u);
      for (const Neighbor &nb: g.neighbors(u)) {
        if (!ring_bond[nb.bond])
          continue;
        if (comp[nb.atom] < 0) {
          comp[nb.atom] = id;
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(sys.atom_indices.begin(), sys.atom_indices.end());
    for (int b = 0; b < g.num_bonds(); ++b)
      if (ring_bond[b] && comp[g.bond(b).src] == id)
        sys.bond_indices.push_back(b);
    systems.push_back(std::move(sys));
  }
  return systems;
}

bool graphs_equal(const MolecularGraph &a, const MolecularGraph &b) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  return canonical_form(a) == canonical_form(b);
}

}  // namespace motifdiff
