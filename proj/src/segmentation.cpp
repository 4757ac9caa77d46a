//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "segmentation.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <utility>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"

namespace motifdiff {

// --- PairCache ---

std::optional<int> PairCache::find(const detail::PairSig &sig) const {
  std::shared_lock lock(mu_);
  auto it = pairs_.find(sig);
  if (it == pairs_.end())
    return std::nullopt;
  return it->second;
}

int PairCache::intern(CanonicalString key, int size) {
  auto it = key_ids_.find(key);
  if (it != key_ids_.end())
    return it->second;
  int id = static_cast<int>(keys_.size());
  keys_.push_back(key);
  sizes_.push_back(size);
  key_ids_.emplace(std::move(key), id);
  return id;
}

int PairCache::insert(const detail::PairSig &sig, CanonicalString key,
                      int size) {
  std::unique_lock lock(mu_);
  auto it = pairs_.find(sig);
  if (it != pairs_.end())
    return it->second;
  int id = intern(std::move(key), size);
  pairs_.emplace(sig, id);
  return id;
}

int PairCache::ring_id(const CanonicalString &key,
                       const MolecularGraph &fragment) {
  {
    std::shared_lock lock(mu_);
    auto it = ring_ids_.find(key);
    if (it != ring_ids_.end())
      return it->second;
  }
  std::unique_lock lock(mu_);
  auto it = ring_ids_.find(key);
  if (it != ring_ids_.end())
    return it->second;
  int id = static_cast<int>(ring_keys_.size());
  ring_keys_.push_back(key);
  std::vector<int> ord = canonical_order(fragment);
  ring_templates_.push_back(induced_subgraph(fragment, ord));
  ring_ids_.emplace(key, id);
  return id;
}

const MolecularGraph &PairCache::ring_template(int id) const {
  std::shared_lock lock(mu_);
  return ring_templates_[id];
}

const CanonicalString &PairCache::ring_key(int id) const {
  std::shared_lock lock(mu_);
  return ring_keys_[id];
}

const CanonicalString &PairCache::key(int id) const {
  std::shared_lock lock(mu_);
  return keys_[id];
}

int PairCache::key_size(int id) const {
  std::shared_lock lock(mu_);
  return sizes_[id];
}

int PairCache::num_keys() const {
  std::shared_lock lock(mu_);
  return static_cast<int>(keys_.size());
}

namespace detail {
namespace {
bool verify_mapping(const MolecularGraph &tmpl, const MolecularGraph &g,
                    std::span<const int> cand) {
  for (int k = 0; k < tmpl.num_atoms(); ++k) {
    if (!(tmpl.atom(k) == g.atom(cand[k])))
      return false;
  }
  for (const Bond &b: tmpl.bonds()) {
    int e = g.find_bond(cand[b.src], cand[b.dst]);
    if (e < 0 || g.bond(e).order != b.order)
      return false;
  }
  return true;
}

// Backtracking isomorphism search; only reached when the canonical labeling
// of a fragment is not consistent with its template.
bool search(const MolecularGraph &tmpl, const MolecularGraph &sub,
            const std::vector<int> &order, std::size_t depth,
            std::vector<int> &map, std::vector<bool> &used) {
  if (depth == order.size())
    return true;
  int t = order[depth];
  for (int s = 0; s < sub.num_atoms(); ++s) {
    if (used[s] || !(sub.atom(s) == tmpl.atom(t)) ||
        sub.degree(s) != tmpl.degree(t))
      continue;
    bool ok = true;
    for (const Neighbor &nb: tmpl.neighbors(t)) {
      int m = map[nb.atom];
      if (m < 0)
        continue;
      int e = sub.find_bond(s, m);
      if (e < 0 || sub.bond(e).order != tmpl.bond(nb.bond).order) {
        ok = false;
        break;
      }
    }
    if (!ok)
      continue;
    map[t] = s;
    used[s] = true;
    if (search(tmpl, sub, order, depth + 1, map, used))
      return true;
    map[t] = -1;
    used[s] = false;
  }
  return false;
}
}  // namespace

std::vector<int> map_to_template(const MolecularGraph &tmpl,
                                 const MolecularGraph &g,
                                 std::span<const int> atoms) {
  if (static_cast<int>(atoms.size()) != tmpl.num_atoms())
    return {};
  MolecularGraph sub = induced_subgraph(g, atoms);
  if (sub.num_bonds() != tmpl.num_bonds())
    return {};
  std::vector<int> ord = canonical_order(sub);
  std::vector<int> cand(ord.size());
  for (std::size_t k = 0; k < ord.size(); ++k)
    cand[k] = atoms[ord[k]];
  if (verify_mapping(tmpl, g, cand))
    return cand;

  // BFS order over the template keeps the partial map connected.
  std::vector<int> order;
  std::vector<bool> seen(tmpl.num_atoms(), false);
  for (int r = 0; r < tmpl.num_atoms(); ++r) {
    if (seen[r])
      continue;
    seen[r] = true;
    order.push_back(r);
    for (std::size_t h = order.size() - 1; h < order.size(); ++h) {
      for (const Neighbor &nb: tmpl.neighbors(order[h])) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          order.push_back(nb.atom);
        }
      }
    }
  }
  std::vector<int> map(tmpl.num_atoms(), -1);
  std::vector<bool> used(sub.num_atoms(), false);
  if (!search(tmpl, sub, order, 0, map, used))
    return {};
  for (int k = 0; k < tmpl.num_atoms(); ++k)
    cand[k] = atoms[map[k]];
  return cand;
}

CanonicalString single_atom_key(const AtomNode &atom) {
  MolecularGraph g;
  g.add_atom(atom);
  return canonical_form(g);
}

// --- Segmentation ---

// Fragments are matched in canonical-rank order so the template automorphism
// picked for a symmetric motif does not depend on input atom order.
std::vector<int> Segmentation::by_rank(std::vector<int> atoms) const {
  std::sort(atoms.begin(), atoms.end(),
            [&](int a, int b) { return ranks_[a] < ranks_[b]; });
  return atoms;
}

Segmentation::Segmentation(const MolecularGraph &g, const MotifVocabulary &v)
    : g_(&g), ranks_(canonical_ranks(g)), atom_inst_(g.num_atoms(), -1),
      atom_pos_(g.num_atoms(), 0), atom_ring_(g.num_atoms(), -1),
      atom_ring_pos_(g.num_atoms(), 0) {
  PairCache &cache = v.cache();
  for (const RingSystem &sys: extract_ring_systems(g)) {
    MolecularGraph frag = induced_subgraph(g, sys.atom_indices);
    CanonicalString key = canonical_form(frag);
    auto id = v.find(key);
    if (id && v.motif(*id).kind == MotifKind::kRing) {
      std::vector<int> mapped =
          map_to_template(v.motif(*id).graph, g, by_rank(sys.atom_indices));
      if (mapped.empty())
        throw Error(ErrorKind::kAmbiguousEncoding,
                    "ring system does not match its motif template");
      place(*id, std::move(mapped));
      continue;
    }
    int rid = cache.ring_id(key, frag);
    std::vector<int> mapped =
        map_to_template(cache.ring_template(rid), g, by_rank(sys.atom_indices));
    if (mapped.empty())
      throw Error(ErrorKind::kAmbiguousEncoding,
                  "ring system does not match its template");
    int r = static_cast<int>(rings_.size());
    for (std::size_t k = 0; k < mapped.size(); ++k) {
      atom_ring_[mapped[k]] = r;
      atom_ring_pos_[mapped[k]] = static_cast<int>(k);
    }
    rings_.push_back({ std::move(mapped), rid, false });
  }

  for (int a = 0; a < g.num_atoms(); ++a) {
    if (atom_inst_[a] >= 0)
      continue;
    const AtomNode &atom = g.atom(a);
    int motif = -1;
    if (atom.element >= 0 && atom.element < kNumAtomTypes &&
        atom == plain_atom(atom.element)) {
      motif = atom.element;
    } else {
      CanonicalString key = single_atom_key(atom);
      auto id = v.find(key);
      if (!id || v.motif(*id).size() != 1)
        throw Error(ErrorKind::kUnknownAtomVariant,
                    "atom variant not in vocabulary: " + key);
      motif = *id;
    }
    place(motif, { a });
  }
}

void Segmentation::place(int motif, std::vector<int> atoms) {
  int idx = static_cast<int>(inst_.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    atom_inst_[atoms[k]] = idx;
    atom_pos_[atoms[k]] = static_cast<int>(k);
  }
  inst_.push_back({ motif, std::move(atoms), true });
  ++alive_;
}

int Segmentation::unit_of(int atom) const {
  int r = atom_ring_[atom];
  if (r >= 0 && !rings_[r].collapsed)
    return -(r + 1);
  return atom_inst_[atom];
}

UnitSig Segmentation::sig_of(int unit, int atom) const {
  if (unit < 0) {
    const Ring &r = rings_[-unit - 1];
    return { 1, r.key, atom_ring_pos_[atom] };
  }
  return { 0, inst_[unit].motif, atom_pos_[atom] };
}

std::vector<int> Segmentation::unit_atoms(int unit) const {
  if (unit < 0)
    return rings_[-unit - 1].atoms;
  return inst_[unit].atoms;
}

CanonicalString Segmentation::unit_key(int unit, const MotifVocabulary &v,
                                       const PairCache &cache) const {
  if (unit < 0)
    return cache.ring_key(rings_[-unit - 1].key);
  return v.motif(inst_[unit].motif).canonical_key;
}

void Segmentation::occurrences(PairCache &cache,
                               std::vector<Occurrence> &out) const {
  out.clear();
  const MolecularGraph &g = *g_;
  for (int b = 0; b < g.num_bonds(); ++b) {
    const Bond &bond = g.bond(b);
    int a1 = bond.src, a2 = bond.dst;
    int u1 = unit_of(a1), u2 = unit_of(a2);
    if (u1 == u2)
      continue;
    UnitSig s1 = sig_of(u1, a1), s2 = sig_of(u2, a2);
    if (s2 < s1) {
      std::swap(s1, s2);
      std::swap(a1, a2);
      std::swap(u1, u2);
    }
    PairSig ps{ s1, s2, static_cast<int>(bond.order) };
    int key;
    if (auto hit = cache.find(ps)) {
      key = *hit;
    } else {
      std::vector<int> atoms = unit_atoms(u1);
      std::vector<int> more = unit_atoms(u2);
      atoms.insert(atoms.end(), more.begin(), more.end());
      MolecularGraph frag = induced_subgraph(g, atoms);
      key = cache.insert(ps, canonical_form(frag), frag.num_atoms());
    }
    out.push_back({ a1, a2, u1, u2, bond.order, key,
                    std::min(ranks_[a1], ranks_[a2]),
                    std::max(ranks_[a1], ranks_[a2]) });
  }
}

int Segmentation::apply(int key, std::span<const Occurrence> occs,
                        const Motif &tmpl, int motif_id) {
  std::vector<const Occurrence *> picked;
  for (const Occurrence &o: occs) {
    if (o.key == key)
      picked.push_back(&o);
  }
  std::sort(picked.begin(), picked.end(),
            [](const Occurrence *x, const Occurrence *y) {
              return std::pair(x->rank_lo, x->rank_hi) <
                     std::pair(y->rank_lo, y->rank_hi);
            });
  std::vector<bool> used_inst(inst_.size(), false);
  std::vector<bool> used_ring(rings_.size(), false);
  auto used = [&](int u) {
    return u < 0 ? used_ring[-u - 1] : used_inst[u];
  };
  auto mark = [&](int u) {
    if (u < 0)
      used_ring[-u - 1] = true;
    else
      used_inst[u] = true;
  };
  int merged = 0;
  for (const Occurrence *o: picked) {
    // Occurrences are computed before any rewrite, so a unit touched by an
    // earlier merge in this pass is skipped.
    if (used(o->unit_a) || used(o->unit_b))
      continue;
    mark(o->unit_a);
    mark(o->unit_b);
    std::vector<int> atoms = unit_atoms(o->unit_a);
    std::vector<int> more = unit_atoms(o->unit_b);
    atoms.insert(atoms.end(), more.begin(), more.end());
    std::vector<int> mapped = map_to_template(tmpl.graph, *g_, by_rank(atoms));
    if (mapped.empty())
      throw Error(ErrorKind::kAmbiguousEncoding,
                  "merged fragment does not match its motif template");
    for (int u: { o->unit_a, o->unit_b }) {
      if (u < 0) {
        Ring &r = rings_[-u - 1];
        r.collapsed = true;
        for (int a: r.atoms) {
          if (inst_[atom_inst_[a]].alive) {
            inst_[atom_inst_[a]].alive = false;
            --alive_;
          }
        }
      } else {
        inst_[u].alive = false;
        --alive_;
      }
    }
    place(motif_id, std::move(mapped));
    ++merged;
  }
  return merged;
}

MotifGraph Segmentation::to_motif_graph() const {
  const MolecularGraph &g = *g_;
  std::vector<std::pair<int, int>> live;  // (min rank, instance)
  for (std::size_t i = 0; i < inst_.size(); ++i) {
    if (!inst_[i].alive)
      continue;
    int lo = g.num_atoms();
    for (int a: inst_[i].atoms)
      lo = std::min(lo, ranks_[a]);
    live.emplace_back(lo, static_cast<int>(i));
  }
  std::sort(live.begin(), live.end());
  std::vector<int> node_of(inst_.size(), -1);
  MotifGraph h;
  for (const auto &[rank, i]: live) {
    node_of[i] = static_cast<int>(h.nodes.size());
    h.nodes.push_back(inst_[i].motif);
  }
  for (const Bond &b: g.bonds()) {
    int ia = atom_inst_[b.src], ib = atom_inst_[b.dst];
    if (ia == ib)
      continue;
    h.edges.push_back({ node_of[ia], node_of[ib], b.order, atom_pos_[b.src] });
    h.edges.push_back({ node_of[ib], node_of[ia], b.order, atom_pos_[b.dst] });
  }
  std::sort(h.edges.begin(), h.edges.end(),
            [](const DirectedEdge &x, const DirectedEdge &y) {
              return std::pair(x.source, x.target) <
                     std::pair(y.source, y.target);
            });
  for (std::size_t e = 1; e < h.edges.size(); ++e) {
    if (h.edges[e].source == h.edges[e - 1].source &&
        h.edges[e].target == h.edges[e - 1].target)
      throw Error(ErrorKind::kAmbiguousEncoding,
                  "two motifs are joined by more than one bond");
  }
  return h;
}

}  // namespace detail
}  // namespace motifdiff
