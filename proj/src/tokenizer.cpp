//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/tokenizer.hpp"

#include <algorithm>
#include <limits>

#include "motifdiff/error.hpp"
#include "motifdiff/kernels.hpp"
#include "segmentation.hpp"

namespace motifdiff {

namespace detail {
void replay(Segmentation &seg, const MotifVocabulary &v) {
  PairCache &cache = v.cache();
  std::vector<Occurrence> occs;
  int cursor = 0;
  // The next merge to apply is the earliest one, at or after the cursor,
  // whose result occurs in the current segmentation.
  for (;;) {
    seg.occurrences(cache, occs);
    int best_rank = std::numeric_limits<int>::max();
    int best_key = -1;
    for (const Occurrence &o: occs) {
      const std::vector<int> *ranks = v.merge_ranks(cache.key(o.key));
      if (!ranks)
        continue;
      auto it = std::lower_bound(ranks->begin(), ranks->end(), cursor);
      if (it != ranks->end() && *it < best_rank) {
        best_rank = *it;
        best_key = o.key;
      }
    }
    if (best_key < 0)
      break;
    const MergeRecord &rec = v.merges()[best_rank];
    seg.apply(best_key, occs, v.motif(rec.result_id), rec.result_id);
    cursor = best_rank + 1;
  }
}
}  // namespace detail

MotifGraph encode(const MolecularGraph &g, const MotifVocabulary &v) {
  if (g.empty())
    return {};
  if (!is_connected(g))
    throw Error(ErrorKind::kDisconnectedInput,
                "cannot encode a disconnected molecule");
  detail::Segmentation seg(g, v);
  detail::replay(seg, v);
  return seg.to_motif_graph();
}

MolecularGraph decode(const MotifGraph &h, const MotifVocabulary &v) {
  MolecularGraph g;
  std::vector<int> offset(h.nodes.size());
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    int id = h.nodes[i];
    if (id < 0 || id >= v.size())
      throw Error(ErrorKind::kUnknownMotifId,
                  "motif id " + std::to_string(id) + " is not in the vocabulary");
    const MolecularGraph &m = v.motif(id).graph;
    offset[i] = g.num_atoms();
    for (const AtomNode &a: m.atoms())
      g.add_atom(a);
    for (const Bond &b: m.bonds())
      g.add_bond(offset[i] + b.src, offset[i] + b.dst, b.order);
  }

  const int n = h.num_nodes();
  for (const DirectedEdge &e: h.edges) {
    if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n ||
        e.source == e.target)
      throw Error(ErrorKind::kInvalidArgument, "edge endpoint out of range");
    if (e.attachment < 0 || e.attachment >= v.motif(h.nodes[e.source]).size())
      throw Error(ErrorKind::kDanglingAttachment,
                  "attachment " + std::to_string(e.attachment) +
                      " outside motif " + std::to_string(h.nodes[e.source]));
  }
  for (const DirectedEdge &e: h.edges) {
    if (e.source > e.target)
      continue;
    const DirectedEdge *rev = nullptr;
    for (const DirectedEdge &r: h.edges) {
      if (r.source == e.target && r.target == e.source) {
        rev = &r;
        break;
      }
    }
    if (!rev || rev->bond_order != e.bond_order)
      throw Error(ErrorKind::kMissingReverseEdge,
                  "edge " + std::to_string(e.source) + "->" +
                      std::to_string(e.target) + " has no matching reverse");
    g.add_bond(offset[e.source] + e.attachment,
               offset[e.target] + rev->attachment, e.bond_order);
  }
  for (const DirectedEdge &e: h.edges) {
    if (e.source < e.target)
      continue;
    bool found = std::any_of(h.edges.begin(), h.edges.end(),
                             [&](const DirectedEdge &r) {
                               return r.source == e.target &&
                                      r.target == e.source;
                             });
    if (!found)
      throw Error(ErrorKind::kMissingReverseEdge,
                  "edge " + std::to_string(e.source) + "->" +
                      std::to_string(e.target) + " has no matching reverse");
  }
  return g;
}

std::vector<MotifGraph> encode_all(const std::vector<MolecularGraph> &corpus,
                                   const MotifVocabulary &v, int threads) {
  if (threads <= 1)
    return kernels::serial::encode_all(corpus, v);
  return kernels::parallel::encode_all(corpus, v, threads);
}

}  // namespace motifdiff
