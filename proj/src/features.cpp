//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "motifdiff/error.hpp"
#include "motifdiff/tokenizer.hpp"

namespace motifdiff {

FeatureLayout FeatureLayout::for_vocabulary(const MotifVocabulary &v,
                                            int n_max) {
  FeatureLayout l;
  l.f_motif = v.size();
  l.f_attach = v.max_motif_size();
  l.n_max = n_max;
  return l;
}

TokenState to_token_state(const MotifGraph &h) {
  TokenState s;
  s.n = h.num_nodes();
  s.motif = h.nodes;
  s.bond.assign(s.n * s.n, 0);
  s.attach.assign(s.n * s.n, -1);
  for (const DirectedEdge &e: h.edges) {
    if (e.bond_order == BondOrder::kAromatic)
      throw Error(ErrorKind::kInvalidArgument,
                  "aromatic inter-motif bonds have no bond category");
    s.bond[e.source * s.n + e.target] = bond_category(e.bond_order);
    s.attach[e.source * s.n + e.target] = e.attachment;
  }
  return s;
}

MotifGraph from_token_state(const TokenState &s) {
  MotifGraph h;
  h.nodes = s.motif;
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.n; ++j) {
      int b = s.bond_at(i, j);
      if (b == 0)
        continue;
      if (b < 0 || b >= kNumBondTypes || i == j)
        throw Error(ErrorKind::kInconsistentBondBlocks,
                    "invalid bond category at " + std::to_string(i) + "," +
                        std::to_string(j));
      if (s.attach_at(i, j) < 0)
        throw Error(ErrorKind::kInvalidOneHot,
                    "bond without attachment at " + std::to_string(i) + "," +
                        std::to_string(j));
      h.edges.push_back({ i, j, static_cast<BondOrder>(b), s.attach_at(i, j) });
    }
  }
  return h;
}

GraphTokenMatrix to_matrix(const TokenState &s, const FeatureLayout &layout) {
  if (s.n > layout.n_max)
    throw Error(ErrorKind::kLayoutOverflow,
                std::to_string(s.n) + " nodes exceed n_max " +
                    std::to_string(layout.n_max));
  GraphTokenMatrix m;
  m.layout = layout;
  m.rows = Eigen::MatrixXd::Zero(s.n, layout.width());
  for (int i = 0; i < s.n; ++i) {
    int id = s.motif[i];
    if (id < 0 || id >= layout.f_motif)
      throw Error(ErrorKind::kLayoutOverflow,
                  "motif id " + std::to_string(id) + " outside layout");
    m.rows(i, id) = 1.0;
    for (int j = 0; j < layout.n_max; ++j) {
      int b = j < s.n ? s.bond_at(i, j) : 0;
      m.rows(i, layout.bond_offset(j) + b) = 1.0;
      if (b == 0)
        continue;
      int a = s.attach_at(i, j);
      // Noisy states carry bonds without attachments; the block stays zero.
      if (a < 0)
        continue;
      if (a >= layout.f_attach)
        throw Error(ErrorKind::kLayoutOverflow,
                    "attachment " + std::to_string(a) + " outside layout");
      m.rows(i, layout.attach_offset(j) + a) = 1.0;
    }
  }
  return m;
}

namespace {
// Index of the single 1 in a block, -1 for an all-zero block. Anything else
// is not a one-hot.
int one_hot_index(const Eigen::MatrixXd &rows, int r, int offset, int width) {
  int hit = -1;
  for (int c = 0; c < width; ++c) {
    double x = rows(r, offset + c);
    if (x == 0.0)
      continue;
    if (x != 1.0 || hit >= 0)
      return -2;
    hit = c;
  }
  return hit;
}

Error bad_block(const char *what, int i, int j) {
  return Error(ErrorKind::kInvalidOneHot, std::string(what) + " block (" +
                                              std::to_string(i) + "," +
                                              std::to_string(j) +
                                              ") is not one-hot");
}
}  // namespace

TokenState from_matrix(const GraphTokenMatrix &m,
                       bool allow_missing_attachments) {
  const FeatureLayout &l = m.layout;
  if (m.rows.cols() != l.width())
    throw Error(ErrorKind::kShapeMismatch, "matrix width does not match layout");
  if (m.n() > l.n_max)
    throw Error(ErrorKind::kLayoutOverflow, "more rows than n_max");
  TokenState s;
  s.n = m.n();
  s.motif.resize(s.n);
  s.bond.assign(s.n * s.n, 0);
  s.attach.assign(s.n * s.n, -1);
  for (int i = 0; i < s.n; ++i) {
    int id = one_hot_index(m.rows, i, 0, l.f_motif);
    if (id < 0)
      throw bad_block("motif", i, i);
    s.motif[i] = id;
    for (int j = 0; j < l.n_max; ++j) {
      int b = one_hot_index(m.rows, i, l.bond_offset(j), l.f_bond);
      if (b < 0)
        throw bad_block("bond", i, j);
      int a = one_hot_index(m.rows, i, l.attach_offset(j), l.f_attach);
      if (a == -2)
        throw bad_block("attachment", i, j);
      if (b == 0) {
        if (a >= 0)
          throw Error(ErrorKind::kInvalidOneHot,
                      "attachment set on a null bond at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
        continue;
      }
      if (j >= s.n || j == i)
        throw Error(ErrorKind::kInconsistentBondBlocks,
                    "bond to padding or self at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      if (a < 0 && !allow_missing_attachments)
        throw bad_block("attachment", i, j);
      s.bond[i * s.n + j] = b;
      s.attach[i * s.n + j] = a;
    }
  }
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      if (s.bond_at(i, j) != s.bond_at(j, i))
        throw Error(ErrorKind::kInconsistentBondBlocks,
                    "bond blocks (" + std::to_string(i) + "," +
                        std::to_string(j) + ") and (" + std::to_string(j) +
                        "," + std::to_string(i) + ") disagree");
    }
  }
  return s;
}

GraphTokenMatrix featurize(const MotifGraph &h, const FeatureLayout &layout) {
  return to_matrix(to_token_state(h), layout);
}

MotifGraph defeaturize(const GraphTokenMatrix &m, const FeatureLayout &layout) {
  if (m.layout.width() != layout.width() || m.layout.n_max != layout.n_max)
    throw Error(ErrorKind::kShapeMismatch, "matrix layout mismatch");
  return from_token_state(from_matrix(m));
}

// --- encoded corpus text format ---

namespace {
constexpr const char *kEncodedHeader = "# motifdiff-encoded v1";
}

void write_encoded(const std::vector<MotifGraph> &encoded, std::ostream &os) {
  os << kEncodedHeader << '\n';
  for (std::size_t m = 0; m < encoded.size(); ++m) {
    const MotifGraph &h = encoded[m];
    os << m << '\t';
    for (std::size_t i = 0; i < h.nodes.size(); ++i)
      os << (i ? "," : "") << h.nodes[i];
    os << '\t';
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
      const DirectedEdge &d = h.edges[e];
      os << (e ? ";" : "") << d.source << '>' << d.target << ':'
         << static_cast<int>(d.bond_order) << '@' << d.attachment;
    }
    os << '\n';
  }
}

std::vector<MotifGraph> read_encoded(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line != kEncodedHeader)
    throw Error(ErrorKind::kFormatError, "missing encoded-corpus header");
  std::vector<MotifGraph> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty())
      continue;
    auto fail = [&]() {
      return Error(ErrorKind::kFormatError,
                   "encoded corpus line " + std::to_string(lineno));
    };
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw fail();
    std::size_t index = 0;
    try {
      index = std::stoul(line.substr(0, t1));
    } catch (const std::exception &) {
      throw fail();
    }
    if (index != out.size())
      throw fail();
    MotifGraph h;
    std::string ids = line.substr(t1 + 1, t2 - t1 - 1);
    std::string edges = line.substr(t2 + 1);
    std::istringstream is_ids(ids);
    std::string tok;
    while (std::getline(is_ids, tok, ',')) {
      try {
        std::size_t used = 0;
        h.nodes.push_back(std::stoi(tok, &used));
        if (used != tok.size())
          throw fail();
      } catch (const std::logic_error &) {
        throw fail();
      }
    }
    std::istringstream is_edges(edges);
    while (std::getline(is_edges, tok, ';')) {
      int s, t, o, a;
      char gt, colon, at;
      std::istringstream es(tok);
      if (!(es >> s >> gt >> t >> colon >> o >> at >> a) || gt != '>' ||
          colon != ':' || at != '@' || o < 1 || o > 4)
        throw fail();
      std::string rest;
      if (es >> rest)
        throw fail();
      h.edges.push_back({ s, t, static_cast<BondOrder>(o), a });
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace motifdiff
