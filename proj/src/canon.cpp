//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Canonical labeling by iterative neighborhood refinement with
// individualization of the lowest tied class.

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/molgraph.hpp"

namespace motifdiff {
namespace {
using Key = std::vector<int>;

// Assigns rank = number of entries with strictly smaller key. Returns the
// number of distinct ranks.
int rank_by_keys(const std::vector<Key> &keys, std::vector<int> &ranks) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  int classes = 0;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || keys[idx[i]] != keys[idx[i - 1]]) {
      ranks[idx[i]] = i;
      ++classes;
    } else {
      ranks[idx[i]] = ranks[idx[i - 1]];
    }
  }
  return classes;
}

int count_classes(const std::vector<int> &ranks) {
  std::vector<int> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) -
                          sorted.begin());
}

int refine(const MolecularGraph &g, std::vector<int> &ranks, int classes) {
  const int n = g.num_atoms();
  std::vector<Key> keys(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      Key &k = keys[i];
      k.clear();
      k.push_back(ranks[i]);
      std::vector<int> nbr;
      nbr.reserve(g.degree(i));
      for (const Neighbor &nb: g.neighbors(i))
        nbr.push_back(ranks[nb.atom] * 8 +
                      static_cast<int>(g.bond(nb.bond).order));
      std::sort(nbr.begin(), nbr.end());
      k.insert(k.end(), nbr.begin(), nbr.end());
    }
    int next = rank_by_keys(keys, ranks);
    if (next == classes)
      return classes;
    classes = next;
  }
}

std::string atom_token(const AtomNode &a) {
  std::string tok(element_symbol(a.element));
  if (a.formal_charge != 0)
    tok += (a.formal_charge > 0 ? "+" : "") + std::to_string(a.formal_charge);
  if (a.explicit_hydrogens)
    tok += "H" + std::to_string(*a.explicit_hydrogens);
  if (a.aromatic)
    tok += "~";
  return tok;
}
}  // namespace

std::vector<int> canonical_ranks(const MolecularGraph &g) {
  const int n = g.num_atoms();
  std::vector<int> ranks(n, 0);
  if (n == 0)
    return ranks;

  std::vector<Key> init(n);
  for (int i = 0; i < n; ++i) {
    const AtomNode &a = g.atom(i);
    Key &k = init[i];
    k = { a.element, a.formal_charge, a.explicit_hydrogens.value_or(-1),
          a.aromatic ? 1 : 0, g.degree(i) };
    std::vector<int> orders;
    for (const Neighbor &nb: g.neighbors(i))
      orders.push_back(static_cast<int>(g.bond(nb.bond).order));
    std::sort(orders.begin(), orders.end());
    k.insert(k.end(), orders.begin(), orders.end());
  }
  int classes = rank_by_keys(init, ranks);
  classes = refine(g, ranks, classes);

  while (classes < n) {
    // Lowest rank shared by more than one atom.
    std::vector<int> count(n, 0);
    for (int r: ranks)
      ++count[r];
    int tied = 0;
    while (count[tied] < 2)
      ++tied;
    int chosen = -1;
    for (int i = 0; i < n && chosen < 0; ++i)
      if (ranks[i] == tied)
        chosen = i;
    for (int i = 0; i < n; ++i)
      if (ranks[i] == tied && i != chosen)
        ranks[i] = tied + 1;
    classes = refine(g, ranks, count_classes(ranks));
  }
  return ranks;
}

std::vector<int> canonical_order(const MolecularGraph &g) {
  std::vector<int> ranks = canonical_ranks(g);
  std::vector<int> order(ranks.size());
  for (int i = 0; i < static_cast<int>(ranks.size()); ++i)
    order[ranks[i]] = i;
  return order;
}

CanonicalString canonical_form(const MolecularGraph &g) {
  std::vector<int> ranks = canonical_ranks(g);
  std::vector<int> order(ranks.size());
  for (int i = 0; i < g.num_atoms(); ++i)
    order[ranks[i]] = i;

  std::string out;
  for (int i = 0; i < g.num_atoms(); ++i) {
    if (i > 0)
      out += '.';
    out += atom_token(g.atom(order[i]));
  }
  std::vector<std::tuple<int, int, int>> edges;
  edges.reserve(g.num_bonds());
  for (const Bond &b: g.bonds()) {
    int x = ranks[b.src], y = ranks[b.dst];
    if (x > y)
      std::swap(x, y);
    edges.emplace_back(x, y, static_cast<int>(b.order));
  }
  std::sort(edges.begin(), edges.end());
  out += '|';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [x, y, o] = edges[i];
    if (i > 0)
      out += ',';
    out += std::to_string(x) + "-" + std::to_string(y) + ":" +
           std::to_string(o);
  }
  return out;
}

MolecularGraph graph_from_canonical(const CanonicalString &key) {
  auto fail = [&key]() -> Error {
    return Error(ErrorKind::kFormatError, "malformed canonical key: " + key);
  };
  std::size_t bar = key.find('|');
  if (bar == std::string::npos)
    throw fail();
  MolecularGraph g;
  std::string_view atoms(key.data(), bar);
  while (!atoms.empty()) {
    std::size_t dot = atoms.find('.');
    std::string_view tok = atoms.substr(0, dot);
    atoms = dot == std::string_view::npos ? std::string_view{}
                                          : atoms.substr(dot + 1);
    std::size_t i = 0;
    while (i < tok.size() && (std::isalpha(static_cast<unsigned char>(tok[i])) ||
                              tok[i] == '*')) {
      if (i > 0 && tok[i] == 'H')
        break;
      ++i;
    }
    auto z = element_from_symbol(tok.substr(0, i));
    if (!z)
      throw fail();
    AtomNode a;
    a.element = *z;
    auto read_int = [&](int &out) {
      std::size_t start = i;
      if (i < tok.size() && (tok[i] == '+' || tok[i] == '-'))
        ++i;
      while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i])))
        ++i;
      if (i == start)
        throw fail();
      out = std::stoi(std::string(tok.substr(start, i - start)));
    };
    if (i < tok.size() && (tok[i] == '+' || tok[i] == '-'))
      read_int(a.formal_charge);
    if (i < tok.size() && tok[i] == 'H') {
      ++i;
      int h = 0;
      read_int(h);
      a.explicit_hydrogens = h;
    }
    if (i < tok.size() && tok[i] == '~') {
      a.aromatic = true;
      ++i;
    }
    if (i != tok.size())
      throw fail();
    g.add_atom(a);
  }
  std::string_view edges(key.data() + bar + 1, key.size() - bar - 1);
  while (!edges.empty()) {
    std::size_t comma = edges.find(',');
    std::string e(edges.substr(0, comma));
    edges = comma == std::string_view::npos ? std::string_view{}
                                            : edges.substr(comma + 1);
    int x, y, o;
    char dash, colon;
    std::istringstream is(e);
    if (!(is >> x >> dash >> y >> colon >> o) || dash != '-' || colon != ':' ||
        x < 0 || y < 0 || x >= g.num_atoms() || y >= g.num_atoms() || o < 1 ||
        o > 4)
      throw fail();
    g.add_bond(x, y, static_cast<BondOrder>(o));
  }
  return g;
}

}  // namespace motifdiff
