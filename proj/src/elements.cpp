//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "motifdiff/elements.hpp"

#include <array>
#include <string_view>

#include "motifdiff/error.hpp"

namespace motifdiff {
namespace {
constexpr std::array<std::string_view, kNumAtomTypes> kSymbols = {
    "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<int, 1> kVal1 = { 1 };
constexpr std::array<int, 1> kVal2 = { 2 };
constexpr std::array<int, 1> kVal3 = { 3 };
constexpr std::array<int, 1> kVal4 = { 4 };
constexpr std::array<int, 2> kVal35 = { 3, 5 };
constexpr std::array<int, 3> kVal246 = { 2, 4, 6 };

int group_of(int z) {
  switch (z) {
  case 5:
  case 13:
  case 31:
  case 49:
  case 81:
    return 13;
  case 6:
  case 14:
  case 32:
  case 50:
  case 82:
    return 14;
  case 7:
  case 15:
  case 33:
  case 51:
  case 83:
    return 15;
  case 8:
  case 16:
  case 34:
  case 52:
  case 84:
    return 16;
  case 9:
  case 17:
  case 35:
  case 53:
  case 85:
    return 17;
  default:
    return 0;
  }
}
}  // namespace

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 0 || atomic_number > kNumElements)
    throw Error(ErrorKind::kInvalidArgument,
                "atomic number out of range: " + std::to_string(atomic_number));
  return kSymbols[atomic_number];
}

std::optional<int> element_from_symbol(std::string_view symbol) {
  for (int z = 0; z < kNumAtomTypes; ++z)
    if (kSymbols[z] == symbol)
      return z;
  return std::nullopt;
}

bool is_organic_subset(int atomic_number) {
  switch (atomic_number) {
  case kWildcard:
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

std::span<const int> default_valences(int atomic_number) {
  switch (atomic_number) {
  case kWildcard:  // monovalent polymerization point
  case 1:
  case 9:
  case 17:
  case 35:
  case 53:
    return kVal1;
  case 8:
    return kVal2;
  case 5:
    return kVal3;
  case 6:
  case 14:
    return kVal4;
  case 7:
  case 15:
  case 33:
    return kVal35;
  case 16:
  case 34:
    return kVal246;
  default:
    return {};
  }
}

int charged_valence(int atomic_number, int base_valence, int charge) {
  int group = group_of(atomic_number);
  if (group == 13)
    return base_valence - charge;
  if (group == 14)
    return base_valence - (charge < 0 ? -charge : charge);
  if (group >= 15)
    return base_valence + charge;
  return base_valence;
}

}  // namespace motifdiff
