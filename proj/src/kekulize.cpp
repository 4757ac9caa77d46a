//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <queue>
#include <vector>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/smiles.hpp"

namespace motifdiff {
namespace {
// Edmonds' blossom algorithm for maximum cardinality matching on a general
// graph. Vertex and neighbor iteration order is fixed by the caller.
class BlossomMatcher {
public:
  explicit BlossomMatcher(std::vector<std::vector<int>> adj)
      : n_(static_cast<int>(adj.size())), adj_(std::move(adj)),
        match_(n_, -1), parent_(n_), base_(n_), in_queue_(n_),
        in_blossom_(n_) { }

  void greedy(const std::vector<int> &order) {
    for (int v: order) {
      if (match_[v] >= 0)
        continue;
      for (int u: adj_[v]) {
        if (match_[u] < 0) {
          match_[u] = v;
          match_[v] = u;
          break;
        }
      }
    }
  }

  void augment_all(const std::vector<int> &order) {
    for (int v: order) {
      if (match_[v] >= 0)
        continue;
      int end = find_path(v);
      while (end >= 0) {
        int pv = parent_[end], ppv = match_[pv];
        match_[end] = pv;
        match_[pv] = end;
        end = ppv;
      }
    }
  }

  const std::vector<int> &matching() const { return match_; }

private:
  int lca(int a, int b) {
    std::vector<bool> used(n_, false);
    while (true) {
      a = base_[a];
      used[a] = true;
      if (match_[a] < 0)
        break;
      a = parent_[match_[a]];
    }
    while (true) {
      b = base_[b];
      if (used[b])
        return b;
      b = parent_[match_[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      in_blossom_[base_[v]] = in_blossom_[base_[match_[v]]] = true;
      parent_[v] = child;
      child = match_[v];
      v = parent_[match_[v]];
    }
  }

  int find_path(int root) {
    std::fill(in_queue_.begin(), in_queue_.end(), false);
    std::fill(parent_.begin(), parent_.end(), -1);
    std::iota(base_.begin(), base_.end(), 0);
    std::queue<int> q;
    q.push(root);
    in_queue_[root] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int to: adj_[v]) {
        if (base_[v] == base_[to] || match_[v] == to)
          continue;
        if (to == root || (match_[to] >= 0 && parent_[match_[to]] >= 0)) {
          int cur = lca(v, to);
          std::fill(in_blossom_.begin(), in_blossom_.end(), false);
          mark_path(v, cur, to);
          mark_path(to, cur, v);
          for (int i = 0; i < n_; ++i) {
            if (in_blossom_[base_[i]]) {
              base_[i] = cur;
              if (!in_queue_[i]) {
                in_queue_[i] = true;
                q.push(i);
              }
            }
          }
        } else if (parent_[to] < 0) {
          parent_[to] = v;
          if (match_[to] < 0)
            return to;
          in_queue_[match_[to]] = true;
          q.push(match_[to]);
        }
      }
    }
    return -1;
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_, parent_, base_;
  std::vector<bool> in_queue_, in_blossom_;
};

int target_valence(const AtomNode &a, int used) {
  for (int v: default_valences(a.element)) {
    int cv = charged_valence(a.element, v, a.formal_charge);
    if (cv >= used)
      return cv;
  }
  return -1;
}
}  // namespace

bool needs_pi_bond(const MolecularGraph &g, int atom) {
  const AtomNode &a = g.atom(atom);
  if (!a.aromatic)
    return false;
  bool has_aromatic_bond = false;
  for (const Neighbor &nb: g.neighbors(atom)) {
    BondOrder o = g.bond(nb.bond).order;
    if (o == BondOrder::kAromatic)
      has_aromatic_bond = true;
    else if (o != BondOrder::kSingle)
      return false;  // exocyclic multiple bond already supplies the pi bond
  }
  if (!has_aromatic_bond)
    return false;
  int used = explicit_valence(g, atom) + a.explicit_hydrogens.value_or(0);
  int target = target_valence(a, used);
  return target > used;
}

MolecularGraph kekulize(const MolecularGraph &g) {
  bool any_aromatic = false;
  for (const Bond &b: g.bonds())
    any_aromatic = any_aromatic || b.order == BondOrder::kAromatic;
  for (const AtomNode &a: g.atoms())
    any_aromatic = any_aromatic || a.aromatic;
  if (!any_aromatic)
    return g;

  const int n = g.num_atoms();
  std::vector<bool> needy(n);
  for (int i = 0; i < n; ++i)
    needy[i] = needs_pi_bond(g, i);

  // Iterate in canonical rank order so that isomorphic inputs receive
  // isomorphic Kekule structures.
  std::vector<int> ranks = canonical_ranks(g);
  std::vector<int> local(n, -1), atoms;
  std::vector<int> by_rank(n);
  for (int i = 0; i < n; ++i)
    by_rank[ranks[i]] = i;
  for (int a: by_rank) {
    if (needy[a]) {
      local[a] = static_cast<int>(atoms.size());
      atoms.push_back(a);
    }
  }

  const int m = static_cast<int>(atoms.size());
  std::vector<std::vector<int>> adj(m);
  for (int li = 0; li < m; ++li) {
    for (const Neighbor &nb: g.neighbors(atoms[li])) {
      if (g.bond(nb.bond).order == BondOrder::kAromatic && local[nb.atom] >= 0)
        adj[li].push_back(local[nb.atom]);
    }
    std::sort(adj[li].begin(), adj[li].end());
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  BlossomMatcher matcher(std::move(adj));
  matcher.greedy(order);
  matcher.augment_all(order);
  const std::vector<int> &match = matcher.matching();
  for (int li = 0; li < m; ++li) {
    if (match[li] < 0)
      throw Error(ErrorKind::kKekulizationError,
                  "no Kekule structure: aromatic atom " +
                      std::to_string(atoms[li]) + " cannot take a double bond");
  }

  MolecularGraph out = g;
  for (int b = 0; b < out.num_bonds(); ++b) {
    const Bond &bond = out.bond(b);
    if (bond.order != BondOrder::kAromatic)
      continue;
    int ls = local[bond.src], ld = local[bond.dst];
    bool dbl = ls >= 0 && ld >= 0 && match[ls] == ld;
    out.set_bond_order(b, dbl ? BondOrder::kDouble : BondOrder::kSingle);
  }
  for (int i = 0; i < n; ++i)
    out.atom(i).aromatic = false;
  return out;
}

}  // namespace motifdiff
