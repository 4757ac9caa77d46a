//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/smiles.hpp"

namespace motifdiff {
namespace {
struct PendingRing {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

bool is_digit(char c) {
  return c >= '0' && c <= '9';
}

class Parser {
public:
  Parser(std::string_view text, std::vector<std::string> *warnings)
      : text_(text), warnings_(warnings) { }

  MolecularGraph run() {
    if (text_.empty())
      throw ParseError(0, "empty SMILES");

    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0)
          throw ParseError(pos_, "branch without preceding atom");
        if (pending_bond_)
          throw ParseError(pos_, "bond symbol before branch");
        branches_.push_back(prev_);
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == ')')
          throw ParseError(pos_, "empty branch");
      } else if (c == ')') {
        if (branches_.empty())
          throw ParseError(pos_, "unbalanced ')'");
        if (pending_bond_)
          throw ParseError(pos_, "dangling bond symbol");
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        throw Error(ErrorKind::kUnsupportedFeature,
                    "disconnected SMILES ('.') at offset " +
                        std::to_string(pos_));
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
                 c == '\\' || c == '$') {
        parse_bond_symbol();
      } else if (is_digit(c) || c == '%') {
        parse_ring_closure();
      } else {
        parse_atom();
      }
    }
    if (!branches_.empty())
      throw ParseError(text_.size(), "unclosed branch");
    if (!rings_.empty())
      throw ParseError(rings_.begin()->second.offset, "unclosed ring");
    if (pending_bond_)
      throw ParseError(text_.size(), "dangling bond symbol");
    demote_acyclic_aromatic_bonds();
    return std::move(g_);
  }

private:
  void warn(const std::string &msg) {
    if (warnings_ != nullptr)
      warnings_->push_back(msg);
  }

  void parse_bond_symbol() {
    if (prev_ < 0)
      throw ParseError(pos_, "bond symbol without preceding atom");
    if (pending_bond_)
      throw ParseError(pos_, "consecutive bond symbols");
    char c = text_[pos_];
    switch (c) {
    case '-':
      pending_bond_ = BondOrder::kSingle;
      break;
    case '=':
      pending_bond_ = BondOrder::kDouble;
      break;
    case '#':
      pending_bond_ = BondOrder::kTriple;
      break;
    case ':':
      pending_bond_ = BondOrder::kAromatic;
      break;
    case '/':
    case '\\':
      warn("directional bond at offset " + std::to_string(pos_) +
           " read as single");
      pending_bond_ = BondOrder::kSingle;
      break;
    default:
      throw Error(ErrorKind::kUnsupportedFeature,
                  "quadruple bond at offset " + std::to_string(pos_));
    }
    ++pos_;
  }

  void parse_ring_closure() {
    std::size_t start = pos_;
    if (prev_ < 0)
      throw ParseError(pos_, "ring closure without preceding atom");
    int num;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) ||
          !is_digit(text_[pos_ + 2]))
        throw ParseError(pos_, "malformed %nn ring closure");
      num = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      num = text_[pos_] - '0';
      ++pos_;
    }

    auto it = rings_.find(num);
    if (it == rings_.end()) {
      rings_[num] = { prev_, pending_bond_, start };
      pending_bond_.reset();
      return;
    }

    PendingRing open = it->second;
    rings_.erase(it);
    std::optional<BondOrder> order = pending_bond_;
    pending_bond_.reset();
    if (open.order && order && *open.order != *order)
      throw ParseError(start, "conflicting ring-closure bond orders");
    if (!order)
      order = open.order;
    if (open.atom == prev_)
      throw ParseError(start, "ring closure to itself");
    if (g_.find_bond(open.atom, prev_) >= 0)
      throw ParseError(start, "ring closure duplicates an existing bond");
    g_.add_bond(open.atom, prev_, order.value_or(default_order(open.atom, prev_)));
  }

  BondOrder default_order(int a, int b) const {
    return g_.atom(a).aromatic && g_.atom(b).aromatic ? BondOrder::kAromatic
                                                      : BondOrder::kSingle;
  }

  void parse_atom() {
    std::size_t start = pos_;
    AtomNode atom;
    if (text_[pos_] == '[') {
      atom = parse_bracket_atom();
    } else {
      atom = parse_organic_atom();
    }
    int idx = g_.add_atom(atom);
    if (prev_ >= 0) {
      g_.add_bond(prev_, idx,
                  pending_bond_.value_or(default_order(prev_, idx)));
    } else if (pending_bond_) {
      throw ParseError(start, "bond symbol without preceding atom");
    }
    pending_bond_.reset();
    prev_ = idx;
  }

  AtomNode parse_organic_atom() {
    char c = text_[pos_];
    AtomNode atom;
    if (c == '*') {
      atom.element = kWildcard;
      ++pos_;
      return atom;
    }
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      atom.element = 17;
      pos_ += 2;
      return atom;
    }
    if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      atom.element = 35;
      pos_ += 2;
      return atom;
    }
    switch (c) {
    case 'B':
      atom.element = 5;
      break;
    case 'C':
      atom.element = 6;
      break;
    case 'N':
      atom.element = 7;
      break;
    case 'O':
      atom.element = 8;
      break;
    case 'P':
      atom.element = 15;
      break;
    case 'S':
      atom.element = 16;
      break;
    case 'F':
      atom.element = 9;
      break;
    case 'I':
      atom.element = 53;
      break;
    case 'b':
      atom.element = 5;
      atom.aromatic = true;
      break;
    case 'c':
      atom.element = 6;
      atom.aromatic = true;
      break;
    case 'n':
      atom.element = 7;
      atom.aromatic = true;
      break;
    case 'o':
      atom.element = 8;
      atom.aromatic = true;
      break;
    case 'p':
      atom.element = 15;
      atom.aromatic = true;
      break;
    case 's':
      atom.element = 16;
      atom.aromatic = true;
      break;
    default:
      throw ParseError(pos_, std::string("unexpected character '") +
                                 (std::isprint(static_cast<unsigned char>(c))
                                      ? std::string(1, c)
                                      : std::string("\\x") +
                                            std::to_string(
                                                static_cast<unsigned char>(c))) +
                                 "'");
    }
    ++pos_;
    return atom;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  int read_number() {
    int v = 0, digits = 0;
    while (is_digit(peek()) && digits < 4) {
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    return v;
  }

  AtomNode parse_bracket_atom() {
    std::size_t open = pos_;
    ++pos_;  // '['
    AtomNode atom;
    atom.explicit_hydrogens = 0;

    if (is_digit(peek())) {
      read_number();
      warn("isotope stripped at offset " + std::to_string(open));
    }

    char c = peek();
    if (c == '*') {
      atom.element = kWildcard;
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::optional<int> z;
      if (pos_ + 1 < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        z = element_from_symbol(text_.substr(pos_, 2));
        if (z)
          pos_ += 2;
      }
      if (!z) {
        z = element_from_symbol(text_.substr(pos_, 1));
        if (!z)
          throw ParseError(pos_, "unknown element symbol");
        ++pos_;
      }
      atom.element = *z;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::string_view kTwo[] = { "se", "as", "te" };
      bool found = false;
      for (std::string_view sym: kTwo) {
        if (text_.substr(pos_, 2) == sym) {
          std::string upper(sym);
          upper[0] = static_cast<char>(std::toupper(upper[0]));
          atom.element = *element_from_symbol(upper);
          pos_ += 2;
          found = true;
          break;
        }
      }
      if (!found) {
        switch (c) {
        case 'b':
          atom.element = 5;
          break;
        case 'c':
          atom.element = 6;
          break;
        case 'n':
          atom.element = 7;
          break;
        case 'o':
          atom.element = 8;
          break;
        case 'p':
          atom.element = 15;
          break;
        case 's':
          atom.element = 16;
          break;
        default:
          throw ParseError(pos_, "unknown aromatic symbol");
        }
        ++pos_;
      }
      atom.aromatic = true;
    } else {
      throw ParseError(pos_, "expected element symbol in bracket atom");
    }

    if (peek() == '@') {
      while (peek() == '@')
        ++pos_;
      // @TH1, @AL2, @SP3, @TB10, @OH20
      if (std::isupper(static_cast<unsigned char>(peek())) && peek() != 'H') {
        pos_ += 2;
        read_number();
      }
      warn("chirality stripped at offset " + std::to_string(open));
    }

    if (peek() == 'H') {
      ++pos_;
      atom.explicit_hydrogens = is_digit(peek()) ? read_number() : 1;
    }

    if (peek() == '+' || peek() == '-') {
      char sign = text_[pos_];
      int mag = 0;
      while (peek() == sign) {
        ++mag;
        ++pos_;
      }
      if (mag == 1 && is_digit(peek()))
        mag = read_number();
      if (mag > 15)
        throw ParseError(pos_, "charge out of range");
      atom.formal_charge = sign == '+' ? mag : -mag;
    }

    if (peek() == ':') {
      ++pos_;
      if (!is_digit(peek()))
        throw ParseError(pos_, "malformed atom class");
      read_number();
    }

    if (peek() != ']')
      throw ParseError(pos_, "expected ']'");
    ++pos_;
    return atom;
  }

  // Bonds between aromatic atoms that do not lie on a ring are single.
  void demote_acyclic_aromatic_bonds() {
    bool any = false;
    for (const Bond &b: g_.bonds())
      any = any || b.order == BondOrder::kAromatic;
    if (!any)
      return;
    std::vector<bool> ring = cycle_bonds(g_);
    for (int i = 0; i < g_.num_bonds(); ++i)
      if (g_.bond(i).order == BondOrder::kAromatic && !ring[i])
        g_.set_bond_order(i, BondOrder::kSingle);
  }

  std::string_view text_;
  std::vector<std::string> *warnings_;
  std::size_t pos_ = 0;
  MolecularGraph g_;
  int prev_ = -1;
  std::optional<BondOrder> pending_bond_;
  std::vector<int> branches_;
  std::map<int, PendingRing> rings_;
};
}  // namespace

MolecularGraph parse_smiles_aromatic(std::string_view text,
                                     std::vector<std::string> *warnings) {
  return Parser(text, warnings).run();
}

MolecularGraph parse_smiles(std::string_view text,
                            std::vector<std::string> &warnings) {
  return kekulize(parse_smiles_aromatic(text, &warnings));
}

MolecularGraph parse_smiles(std::string_view text) {
  return kekulize(parse_smiles_aromatic(text, nullptr));
}

}  // namespace motifdiff
