//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "motifdiff/error.hpp"
#include "motifdiff/molgraph.hpp"
#include "motifdiff/smiles.hpp"
#include "test_util.hpp"

namespace motifdiff {
namespace {

MolecularGraph random_graph(std::mt19937_64 &gen, int n, bool connected) {
  static const int elements[] = { 6, 7, 8 };
  MolecularGraph g;
  for (int i = 0; i < n; ++i) {
    AtomNode a;
    a.element = elements[gen() % 3];
    if (gen() % 7 == 0)
      a.formal_charge = 1;
    g.add_atom(a);
  }
  auto order = [&] {
    return gen() % 4 == 0 ? BondOrder::kDouble : BondOrder::kSingle;
  };
  if (connected)
    for (int i = 1; i < n; ++i)
      g.add_bond(i, static_cast<int>(gen() % i), order());
  for (int e = 0; e < n; ++e) {
    int a = static_cast<int>(gen() % n), b = static_cast<int>(gen() % n);
    if (a != b && g.find_bond(a, b) < 0)
      g.add_bond(a, b, order());
  }
  return g;
}

MolecularGraph shuffled(const MolecularGraph &g, std::mt19937_64 &gen) {
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  return permute_atoms(g, perm);
}

// Exhaustive label-preserving isomorphism test.
bool brute_isomorphic(const MolecularGraph &a, const MolecularGraph &b) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  std::vector<int> p(a.num_atoms());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; ok && i < a.num_atoms(); ++i)
      ok = a.atom(i) == b.atom(p[i]);
    for (int k = 0; ok && k < a.num_bonds(); ++k) {
      const Bond &x = a.bond(k);
      int y = b.find_bond(p[x.src], p[x.dst]);
      ok = y >= 0 && b.bond(y).order == x.order;
    }
    if (ok)
      return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

bool reachable_without(const MolecularGraph &g, int from, int to, int skip) {
  std::vector<bool> seen(g.num_atoms());
  std::vector<int> stack{ from };
  seen[from] = true;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    if (a == to)
      return true;
    for (const Neighbor &nb: g.neighbors(a)) {
      if (nb.bond == skip || seen[nb.atom])
        continue;
      seen[nb.atom] = true;
      stack.push_back(nb.atom);
    }
  }
  return false;
}

TEST(MolGraph, AddBondRejectsBadInput) {
  MolecularGraph g;
  g.add_atom({});
  g.add_atom({});
  g.add_bond(0, 1, BondOrder::kSingle);
  EXPECT_THROW(g.add_bond(0, 0, BondOrder::kSingle), Error);
  EXPECT_THROW(g.add_bond(1, 0, BondOrder::kDouble), Error);
  EXPECT_THROW(g.add_bond(0, 2, BondOrder::kSingle), Error);
}

TEST(MolGraph, CycleBondsMatchBridgeDefinition) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    MolecularGraph g = random_graph(gen, 3 + trial % 9, trial % 2 == 0);
    std::vector<bool> fast = cycle_bonds(g);
    for (int b = 0; b < g.num_bonds(); ++b)
      EXPECT_EQ(fast[b], reachable_without(g, g.bond(b).src, g.bond(b).dst, b))
          << "trial " << trial << " bond " << b;
  }
}

TEST(MolGraph, RingSystems) {
  auto naph = extract_ring_systems(parse_smiles("c1ccc2ccccc2c1"));
  ASSERT_EQ(naph.size(), 1U);
  EXPECT_EQ(naph[0].atom_indices.size(), 10U);
  EXPECT_EQ(naph[0].bond_indices.size(), 11U);

  auto biphenyl = extract_ring_systems(parse_smiles("c1ccccc1-c1ccccc1"));
  EXPECT_EQ(biphenyl.size(), 2U);
  EXPECT_TRUE(extract_ring_systems(parse_smiles("CCCC")).empty());
}

TEST(MolGraph, Connectivity) {
  EXPECT_TRUE(is_connected(parse_smiles("CCO")));
  MolecularGraph g;
  g.add_atom({});
  g.add_atom({});
  EXPECT_FALSE(is_connected(g));
}

TEST(Canon, RanksArePermutation) {
  for (const MolecularGraph &g: test::corpus(200)) {
    std::vector<int> r = canonical_ranks(g);
    std::vector<int> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < g.num_atoms(); ++i)
      ASSERT_EQ(sorted[i], i);
  }
}

TEST(Canon, InvariantUnderPermutation) {
  std::mt19937_64 gen(5);
  for (const MolecularGraph &g: test::corpus(300)) {
    CanonicalString key = canonical_form(g);
    for (int k = 0; k < 3; ++k)
      ASSERT_EQ(canonical_form(shuffled(g, gen)), key) << write_smiles(g);
  }
}

TEST(Canon, AgreesWithExhaustiveIsomorphism) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 400; ++trial) {
    int n = 2 + trial % 6;
    MolecularGraph a = random_graph(gen, n, true);
    MolecularGraph b = trial % 3 == 0 ? shuffled(a, gen)
                                      : random_graph(gen, n, true);
    EXPECT_EQ(canonical_form(a) == canonical_form(b), brute_isomorphic(a, b))
        << "trial " << trial;
  }
}

TEST(Canon, SymmetricGraphsAreHandled) {
  // Highly symmetric inputs stress the tie-breaking.
  for (const char *s: { "C1CCCCC1", "C12C3C4C1C5C2C3C45", "C1CC2CCC1CC2",
                        "C(C)(C)(C)C" }) {
    MolecularGraph g = parse_smiles(s);
    std::mt19937_64 gen(3);
    for (int k = 0; k < 10; ++k)
      EXPECT_EQ(canonical_form(shuffled(g, gen)), canonical_form(g)) << s;
  }
}

TEST(Canon, FormRoundTrips) {
  for (const MolecularGraph &g: test::corpus(200)) {
    MolecularGraph back = graph_from_canonical(canonical_form(g));
    EXPECT_TRUE(graphs_equal(back, g));
  }
  EXPECT_THROW(graph_from_canonical("not a key"), Error);
}

TEST(Valence, ImplicitHydrogens) {
  MolecularGraph g = parse_smiles("CC(=O)N");
  EXPECT_EQ(total_hydrogens(g, 0), 3);
  EXPECT_EQ(total_hydrogens(g, 1), 0);
  EXPECT_EQ(total_hydrogens(g, 2), 0);
  EXPECT_EQ(total_hydrogens(g, 3), 2);
  EXPECT_TRUE(valence_ok(g));
  EXPECT_EQ(total_hydrogens(parse_smiles("[NH4+]"), 0), 4);
}

TEST(MolGraph, InducedSubgraph) {
  MolecularGraph g = parse_smiles("CCOC");
  std::vector<int> atoms{ 2, 1 };
  MolecularGraph sub = induced_subgraph(g, atoms);
  ASSERT_EQ(sub.num_atoms(), 2);
  EXPECT_EQ(sub.atom(0).element, 8);
  EXPECT_EQ(sub.num_bonds(), 1);
}

}  // namespace
}  // namespace motifdiff
