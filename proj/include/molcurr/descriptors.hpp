#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "molcurr/fg_library.hpp"
#include "molcurr/mol_graph.hpp"
#include "molcurr/molecule.hpp"

namespace molcurr {

class EmptyMoleculeError : public std::runtime_error {
 public:
  EmptyMoleculeError() : std::runtime_error("EmptyMolecule: no heavy atoms") {}
};

struct DescriptorRecord {
  double d_scaf = 0.0;
  double rarity = 0.0;
  int conjugation = 0;
  int arom_sub = 0;
  double bertz_ct = 0.0;
  StructuralCounts counts;
  int n_fg = 0;
  std::vector<std::string> fg_names;  // sorted
};

// 1 - n_scaffold / n_ha, in [0, 1]; 1 for acyclic molecules.
double scaffold_decoration(const MolecularGraph &graph);

// Mean of (1 - P(f)) over the distinct groups present, 0 when none.
double fg_rarity(const std::vector<std::string> &fg_names, const PrevalenceTable &table);
double fg_rarity(const MolecularGraph &graph, const PrevalenceTable &table,
                 const PatternLibrary &library = PatternLibrary::default_library());

// Atom count of the largest conjugated component.
int conjugation_extent(const MolecularGraph &graph);

// Substitution gap pattern of one ring: cyclic gaps between substituted
// positions, canonicalised to the lexicographically smallest rotation over
// both traversal directions. Empty when no position is substituted.
std::vector<int> ring_gap_pattern(const std::vector<bool> &substituted);

// Distinct gap patterns over aromatic rings + substituted aromatic-ring
// positions. A ring atom is substituted when it has a heavy neighbour
// outside that ring (fusion partners count).
int aromatic_substitution_complexity(const MolecularGraph &graph);

// Bond environment = (unordered endpoint descriptors, order) with endpoint
// descriptor (element, aromatic, heavy degree); heavy-atom bonds only.
// Returns 1/2 [sum_k n_k log2 n_k + n_e log2 n_e].
double bertz_ct(const MolecularGraph &graph);

// Perceives aromaticity, then assembles all descriptors. Throws
// EmptyMoleculeError when the graph has no heavy atoms.
DescriptorRecord descriptor_record(const MolecularGraph &graph, const PrevalenceTable &table,
                                   const PatternLibrary &library = PatternLibrary::default_library());

// Everything except rarity, which needs corpus prevalence. Used by the
// two-pass annotate pipeline.
DescriptorRecord descriptor_record_without_rarity(
    const MolecularGraph &graph, const PatternLibrary &library = PatternLibrary::default_library());

}  // namespace molcurr
