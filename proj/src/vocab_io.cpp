//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "motifdiff/error.hpp"
#include "motifdiff/npe.hpp"
#include "motifdiff/smiles.hpp"

namespace motifdiff {
namespace {
using nlohmann::json;

constexpr const char *kFormatName = "motifdiff-vocabulary";

MotifKind kind_from_name(const std::string &name) {
  for (MotifKind k: { MotifKind::kAtom, MotifKind::kAtomVariant,
                      MotifKind::kRing, MotifKind::kMerged }) {
    if (motif_kind_name(k) == name)
      return k;
  }
  throw Error(ErrorKind::kFormatError, "unknown motif kind: " + name);
}

std::string key_to_smiles(const CanonicalString &key) {
  return write_smiles(graph_from_canonical(key));
}

CanonicalString smiles_to_key(const std::string &smiles) {
  return canonical_form(parse_smiles(smiles));
}
}  // namespace

void save_vocabulary(const MotifVocabulary &v, std::ostream &os) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kVocabFormatVersion;
  doc["k"] = v.k;
  doc["k_ring"] = v.k_ring;
  doc["min_frequency"] = v.min_frequency;
  doc["num_seed_rings"] = v.num_seed_rings;
  doc["corpus_hash"] = v.corpus_hash;

  json motifs = json::array();
  for (int id = 0; id < v.size(); ++id) {
    const Motif &m = v.motif(id);
    std::vector<int> order;
    std::string smiles = write_smiles(m.graph, order);
    motifs.push_back({ { "id", id },
                       { "smiles", smiles },
                       { "atom_order", order },
                       { "kind", motif_kind_name(m.kind) } });
  }
  doc["motifs"] = std::move(motifs);

  json merges = json::array();
  for (const MergeRecord &r: v.merges()) {
    merges.push_back({ { "left", key_to_smiles(r.left_key) },
                       { "right", key_to_smiles(r.right_key) },
                       { "bond_order", static_cast<int>(r.bond_order) },
                       { "result_id", r.result_id },
                       { "frequency", r.frequency } });
  }
  doc["merges"] = std::move(merges);
  os << doc.dump(1) << '\n';
}

MotifVocabulary load_vocabulary(std::istream &is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kFormatError,
                std::string("vocabulary is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != kFormatName)
      throw Error(ErrorKind::kFormatError, "not a motifdiff vocabulary");
    if (doc.at("version").get<int>() != kVocabFormatVersion)
      throw Error(ErrorKind::kFormatError,
                  "unsupported vocabulary version " +
                      doc.at("version").dump());

    MotifVocabulary v;
    v.k = doc.at("k").get<int>();
    v.k_ring = doc.at("k_ring").get<int>();
    v.min_frequency = doc.value("min_frequency", 1L);
    v.num_seed_rings = doc.at("num_seed_rings").get<int>();
    v.corpus_hash = doc.value("corpus_hash", std::string());

    const json &motifs = doc.at("motifs");
    for (std::size_t id = 0; id < motifs.size(); ++id) {
      const json &m = motifs[id];
      if (m.at("id").get<std::size_t>() != id)
        throw Error(ErrorKind::kFormatError, "motif ids are not contiguous");
      MotifKind kind = kind_from_name(m.at("kind").get<std::string>());
      MolecularGraph parsed = parse_smiles(m.at("smiles").get<std::string>());
      std::vector<int> order = m.at("atom_order").get<std::vector<int>>();
      if (static_cast<int>(order.size()) != parsed.num_atoms())
        throw Error(ErrorKind::kFormatError,
                    "atom_order length mismatch for motif " +
                        std::to_string(id));
      std::vector<bool> seen(order.size(), false);
      for (int x: order) {
        if (x < 0 || x >= parsed.num_atoms() || seen[x])
          throw Error(ErrorKind::kFormatError,
                      "atom_order is not a permutation for motif " +
                          std::to_string(id));
        seen[x] = true;
      }
      Motif motif;
      motif.graph = permute_atoms(parsed, order);
      motif.canonical_key = canonical_form(motif.graph);
      motif.kind = kind;
      if (static_cast<int>(id) < v.size()) {
        if (v.motif(static_cast<int>(id)).canonical_key != motif.canonical_key)
          throw Error(ErrorKind::kFormatError,
                      "atom motif " + std::to_string(id) + " does not match");
        continue;
      }
      if (v.add(std::move(motif)) != static_cast<int>(id))
        throw Error(ErrorKind::kFormatError,
                    "duplicate motif " + std::to_string(id));
    }

    for (const json &r: doc.at("merges")) {
      MergeRecord rec;
      rec.left_key = smiles_to_key(r.at("left").get<std::string>());
      rec.right_key = smiles_to_key(r.at("right").get<std::string>());
      int order = r.at("bond_order").get<int>();
      if (order < 1 || order > 4)
        throw Error(ErrorKind::kFormatError, "bad merge bond order");
      rec.bond_order = static_cast<BondOrder>(order);
      rec.result_id = r.at("result_id").get<int>();
      if (rec.result_id < 0 || rec.result_id >= v.size())
        throw Error(ErrorKind::kFormatError, "merge result id out of range");
      rec.result_key = v.motif(rec.result_id).canonical_key;
      rec.frequency = r.at("frequency").get<long>();
      v.add_merge(std::move(rec));
    }
    return v;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kFormatError,
                std::string("malformed vocabulary: ") + e.what());
  }
}

}  // namespace motifdiff
