//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "motifdiff/elements.hpp"
#include "motifdiff/error.hpp"
#include "motifdiff/smiles.hpp"

namespace motifdiff {
namespace {
struct Closure {
  int bond;
  int partner;
};

class Writer {
public:
  explicit Writer(const MolecularGraph &g)
      : g_(g), ranks_(canonical_ranks(g)), visited_(g.num_atoms(), false),
        tree_bond_(g.num_bonds(), false), children_(g.num_atoms()),
        closures_(g.num_atoms()), digit_of_bond_(g.num_bonds(), -1) { }

  const std::vector<int> &emitted() const { return emitted_; }

  std::string run() {
    if (g_.empty())
      return {};
    if (!is_connected(g_))
      throw Error(ErrorKind::kDisconnectedInput,
                  "cannot write a disconnected graph");
    int root = static_cast<int>(std::min_element(ranks_.begin(), ranks_.end()) -
                                ranks_.begin());
    build_tree(root);
    emit(root);
    return out_;
  }

private:
  std::vector<Neighbor> sorted_neighbors(int atom) const {
    auto nbrs = g_.neighbors(atom);
    std::vector<Neighbor> out(nbrs.begin(), nbrs.end());
    std::sort(out.begin(), out.end(), [&](const Neighbor &a, const Neighbor &b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return out;
  }

  void build_tree(int root) {
    struct Frame {
      int atom;
      std::vector<Neighbor> nbrs;
      std::size_t next;
    };
    std::vector<Frame> stack;
    visited_[root] = true;
    stack.push_back({ root, sorted_neighbors(root), 0 });
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next == f.nbrs.size()) {
        stack.pop_back();
        continue;
      }
      Neighbor nb = f.nbrs[f.next++];
      if (tree_bond_[nb.bond])
        continue;
      if (!visited_[nb.atom]) {
        visited_[nb.atom] = true;
        tree_bond_[nb.bond] = true;
        children_[f.atom].push_back(nb);
        int child = nb.atom;
        stack.push_back({ child, sorted_neighbors(child), 0 });
      } else if (!is_closure(nb.bond)) {
        closures_[f.atom].push_back({ nb.bond, nb.atom });
        closures_[nb.atom].push_back({ nb.bond, f.atom });
        closure_bonds_.push_back(nb.bond);
      }
    }
  }

  bool is_closure(int bond) const {
    return std::find(closure_bonds_.begin(), closure_bonds_.end(), bond) !=
           closure_bonds_.end();
  }

  void emit_bond(int bond, int a, int b) {
    BondOrder o = g_.bond(bond).order;
    switch (o) {
    case BondOrder::kSingle:
      if (g_.atom(a).aromatic && g_.atom(b).aromatic)
        out_ += '-';
      break;
    case BondOrder::kDouble:
      out_ += '=';
      break;
    case BondOrder::kTriple:
      out_ += '#';
      break;
    case BondOrder::kAromatic:
      if (!g_.atom(a).aromatic || !g_.atom(b).aromatic)
        out_ += ':';
      break;
    }
  }

  void emit_atom(int i) {
    const AtomNode &a = g_.atom(i);
    std::string sym(element_symbol(a.element));
    if (a.aromatic)
      sym[0] = static_cast<char>(std::tolower(sym[0]));
    bool bare = is_organic_subset(a.element) && a.formal_charge == 0 &&
                !a.explicit_hydrogens;
    if (bare) {
      out_ += sym;
      return;
    }
    out_ += '[';
    out_ += sym;
    int h = a.explicit_hydrogens.value_or(0);
    if (h == 1)
      out_ += 'H';
    else if (h > 1)
      out_ += "H" + std::to_string(h);
    if (a.formal_charge != 0) {
      out_ += a.formal_charge > 0 ? '+' : '-';
      int mag = std::abs(a.formal_charge);
      if (mag > 1)
        out_ += std::to_string(mag);
    }
    out_ += ']';
  }

  int allocate_digit() {
    for (int d = 1;; ++d) {
      if (std::find(used_digits_.begin(), used_digits_.end(), d) ==
          used_digits_.end()) {
        used_digits_.push_back(d);
        return d;
      }
    }
  }

  void emit_digit(int d) {
    if (d < 10) {
      out_ += static_cast<char>('0' + d);
    } else {
      out_ += '%';
      out_ += std::to_string(d);
    }
  }

  void emit(int root) {
    struct Frame {
      int atom;
      std::size_t next_child;
    };
    std::vector<Frame> stack;
    auto enter = [&](int atom) {
      emit_atom(atom);
      emitted_.push_back(atom);
      auto &cl = closures_[atom];
      std::sort(cl.begin(), cl.end(), [&](const Closure &x, const Closure &y) {
        return ranks_[x.partner] < ranks_[y.partner];
      });
      for (const Closure &c: cl) {
        int d = digit_of_bond_[c.bond];
        if (d < 0) {
          d = allocate_digit();
          digit_of_bond_[c.bond] = d;
          emit_bond(c.bond, atom, c.partner);
          emit_digit(d);
        } else {
          emit_digit(d);
          used_digits_.erase(
              std::find(used_digits_.begin(), used_digits_.end(), d));
        }
      }
      stack.push_back({ atom, 0 });
    };

    enter(root);
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto &kids = children_[f.atom];
      if (f.next_child == kids.size()) {
        stack.pop_back();
        if (!stack.empty() && !needs_close_.empty() &&
            needs_close_.back() == stack.size()) {
          out_ += ')';
          needs_close_.pop_back();
        }
        continue;
      }
      std::size_t k = f.next_child++;
      Neighbor nb = kids[k];
      bool branch = k + 1 < kids.size();
      int parent = f.atom;
      if (branch) {
        out_ += '(';
        needs_close_.push_back(stack.size());
      }
      emit_bond(nb.bond, parent, nb.atom);
      enter(nb.atom);
    }
  }

  const MolecularGraph &g_;
  std::vector<int> ranks_;
  std::vector<bool> visited_;
  std::vector<bool> tree_bond_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Closure>> closures_;
  std::vector<int> closure_bonds_;
  std::vector<int> digit_of_bond_;
  std::vector<int> used_digits_;
  std::vector<int> emitted_;
  std::vector<std::size_t> needs_close_;
  std::string out_;
};
}  // namespace

std::string write_smiles(const MolecularGraph &g) {
  return Writer(g).run();
}

std::string write_smiles(const MolecularGraph &g, std::vector<int> &atom_order) {
  Writer w(g);
  std::string out = w.run();
  atom_order = w.emitted();
  return out;
}

}  // namespace motifdiff
