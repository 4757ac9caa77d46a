//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace motifdiff {

// Atomic number 0 is reserved for the polymerization point "*"; 1..118 are
// the periodic table.
inline constexpr int kNumElements = 118;
inline constexpr int kNumAtomTypes = kNumElements + 1;
inline constexpr int kWildcard = 0;

std::string_view element_symbol(int atomic_number);

// Case-sensitive lookup ("Cl", not "CL"); "*" maps to kWildcard.
std::optional<int> element_from_symbol(std::string_view symbol);

// Elements writable without brackets in SMILES (B C N O P S F Cl Br I, *).
bool is_organic_subset(int atomic_number);

// Standard valences used for implicit hydrogens and kekulization. Empty for
// elements that never receive implicit hydrogens.
std::span<const int> default_valences(int atomic_number);

// Valence after adjusting for formal charge by isoelectronic analogy
// (B- ~ C, C+ ~ B, C- ~ N, N+ ~ C, N- ~ O, O+ ~ N).
int charged_valence(int atomic_number, int base_valence, int charge);

}  // namespace motifdiff
