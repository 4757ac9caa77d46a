//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "motifdiff/molgraph.hpp"

namespace motifdiff {

// Supported dialect: organic-subset and bracket atoms (isotopes and chirality
// stripped with a warning), ring closures 0-9 and %nn, branches, bonds
// - = # : (and / \ read as single with a warning), aromatic lowercase atoms,
// and "*". Disconnected input ('.') and '$' bonds are rejected.
//
// Aromatic input is kekulized before return. Throws ParseError,
// Error(kUnsupportedFeature) or Error(kKekulizationError).
MolecularGraph parse_smiles(std::string_view text);
MolecularGraph parse_smiles(std::string_view text,
                            std::vector<std::string> &warnings);

// Same as parse_smiles but stops before kekulization; aromatic atoms and
// bonds keep their flags.
MolecularGraph parse_smiles_aromatic(std::string_view text,
                                     std::vector<std::string> *warnings);

// Canonical SMILES in the canonical_ranks order. Throws
// Error(kDisconnectedInput) for disconnected graphs.
std::string write_smiles(const MolecularGraph &g);

// Also reports the emission order: atom_order[k] is the graph atom written
// k-th, i.e. the atom that parse_smiles will place at index k.
std::string write_smiles(const MolecularGraph &g, std::vector<int> &atom_order);

// Assigns single/double orders to aromatic bonds so that every aromatic atom
// that needs a pi bond receives exactly one double bond; clears aromatic
// flags. Graphs without aromatic bonds are returned unchanged. Throws
// Error(kKekulizationError) if no perfect matching exists.
MolecularGraph kekulize(const MolecularGraph &g);

// True when the aromatic atom must take a double bond in a Kekule form.
bool needs_pi_bond(const MolecularGraph &g, int atom);

}  // namespace motifdiff
