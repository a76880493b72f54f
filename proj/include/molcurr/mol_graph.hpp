#pragma once

#include <cstddef>
#include <vector>

#include "molcurr/molecule.hpp"

namespace molcurr {

struct StructuralCounts {
  int n_ha = 0;    // heavy atoms
  int n_het = 0;   // heavy atoms other than carbon
  int n_ring = 0;  // cyclomatic number
  int n_sc = 0;    // chirality-marked atoms + fully marked stereo double bonds
  double mw = 0.0; // Da, implicit hydrogens included
};

StructuralCounts structural_counts(const MolecularGraph &graph);

// Ring as an ordered cycle of atom indices (consecutive atoms are bonded).
using Ring = std::vector<AtomIndex>;

inline constexpr std::size_t kMaxRingSize = 8;

// For every ring bond, the shortest cycle through it, deduplicated by atom
// set and limited to `max_size` atoms. Covers fused and bridged drug-like
// systems without a full SSSR computation. Explicit hydrogens are ignored.
std::vector<Ring> small_rings(const MolecularGraph &graph, std::size_t max_size = kMaxRingSize);

// Flags six-membered C/N rings with alternating single/double bonds as
// aromatic (atoms and ring bonds). Existing aromatic flags are kept, and
// aromatic bonds act as wildcards so fused Kekule systems converge.
MolecularGraph perceive_aromaticity(const MolecularGraph &graph);

struct ScaffoldResult {
  std::vector<AtomIndex> scaffold_atoms;  // ascending
  int n_scaffold = 0;
  bool is_empty = true;
};

// Murcko scaffold: the 2-core of the heavy-atom graph (rings plus linkers)
// plus exocyclic atoms double-bonded to a core atom.
ScaffoldResult murcko_scaffold(const MolecularGraph &graph);

// Same result computed by explicit degree-1 pruning in the supplied visit
// order; exposed so order independence can be exercised.
ScaffoldResult murcko_scaffold_pruned(const MolecularGraph &graph,
                                      const std::vector<AtomIndex> &visit_order);

// A bond is conjugated when it is aromatic/double/triple, or single with
// both endpoints carrying such a bond. Returns the atom sets (ascending) of
// connected components of the conjugated-bond subgraph.
std::vector<std::vector<AtomIndex>> conjugated_components(const MolecularGraph &graph);

}  // namespace molcurr
