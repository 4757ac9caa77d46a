//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "motifdiff/smiles.hpp"

namespace motifdiff::test {

inline std::vector<std::string> corpus_lines(std::size_t limit) {
  std::ifstream is(std::string(MOTIFDIFF_DATA_DIR) + "/corpus_10k.smi");
  std::vector<std::string> out;
  std::string line;
  while (out.size() < limit && std::getline(is, line)) {
    line = line.substr(0, line.find_first_of("\t "));
    if (!line.empty())
      out.push_back(line);
  }
  return out;
}

inline std::vector<MolecularGraph> corpus(std::size_t limit) {
  std::vector<MolecularGraph> out;
  for (const std::string &s: corpus_lines(limit))
    out.push_back(parse_smiles(s));
  return out;
}

}  // namespace motifdiff::test
