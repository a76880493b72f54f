#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "molcurr/molecule.hpp"

namespace molcurr {

enum class SmilesErrorKind {
  EmptyInput,
  UnexpectedCharacter,
  UnmatchedRingClosure,
  UnknownElement,
  InvalidBracketAtom,
  DanglingBond,
  UnbalancedBranch,
  DuplicateBond,
  InvalidRingBond,
  InvalidAromaticBond,
  ValenceExceeded,
};

std::string_view to_string(SmilesErrorKind kind) noexcept;

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string &detail);

  SmilesErrorKind kind() const noexcept { return kind_; }
  // Byte offset into the input where the problem was detected.
  std::size_t offset() const noexcept { return offset_; }

 private:
  SmilesErrorKind kind_;
  std::size_t offset_;
};

// Parses the supported SMILES subset: organic-subset atoms, bracket atoms
// (isotope, chirality @/@@, H count, charge, atom class), ring bonds with
// digits and %nn, branches, bond symbols - = # : / \, '.' components and
// lowercase aromatic atoms. Throws SmilesError.
MolecularGraph parse_smiles(std::string_view text);

// Writes a SMILES string that re-parses to a graph isomorphic to `graph`.
// Depth-first from the lowest unvisited atom index, neighbours in index
// order. Not canonical.
std::string write_smiles(const MolecularGraph &graph);

}  // namespace molcurr
