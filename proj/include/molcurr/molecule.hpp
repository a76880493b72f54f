#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace molcurr {

using AtomIndex = std::uint32_t;
using BondIndex = std::uint32_t;

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };
enum class BondStereo : std::uint8_t { None, Up, Down };  // '/' and '\'
enum class Chirality : std::uint8_t { None, At, AtAt };   // '@' and '@@'

struct Atom {
  std::uint8_t element = 6;  // atomic number
  bool aromatic = false;
  bool bracket = false;
  std::int8_t formal_charge = 0;
  std::optional<std::uint8_t> explicit_h;  // bracket H count
  std::optional<std::uint16_t> isotope;
  Chirality chirality = Chirality::None;
  std::uint8_t implicit_h = 0;  // valence-model hydrogens of bare atoms
  AtomIndex index = 0;

  int attached_h() const noexcept { return explicit_h.value_or(0) + implicit_h; }
  bool is_hydrogen() const noexcept { return element == 1; }
};

// `begin`/`end` keep the direction the bond was written in, which is what
// the '/' and '\' marks are relative to.
struct Bond {
  AtomIndex begin = 0;
  AtomIndex end = 0;
  BondOrder order = BondOrder::Single;
  BondStereo stereo = BondStereo::None;

  AtomIndex other(AtomIndex a) const noexcept { return a == begin ? end : begin; }
  bool is_pi() const noexcept { return order != BondOrder::Single; }
};

struct Neighbor {
  AtomIndex atom;
  BondIndex bond;
};

// Immutable molecular graph. Construction builds a CSR adjacency; no
// mutation afterwards, so instances can be shared across threads.
class MolecularGraph {
 public:
  MolecularGraph() = default;
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds, std::string source = {});

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }
  const Atom &atom(AtomIndex i) const { return atoms_[i]; }
  const Bond &bond(BondIndex i) const { return bonds_[i]; }
  const std::string &source() const noexcept { return source_; }

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_bonds() const noexcept { return bonds_.size(); }

  std::span<const Neighbor> neighbors(AtomIndex i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(AtomIndex i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  // Number of non-hydrogen neighbours.
  int heavy_degree(AtomIndex i) const noexcept { return heavy_degree_[i]; }
  // Implicit + bracket + explicit [H] neighbour hydrogens.
  int total_h(AtomIndex i) const noexcept;

  std::optional<BondIndex> bond_between(AtomIndex a, AtomIndex b) const noexcept;

  // Connected component id per atom, ids dense from 0.
  std::span<const std::uint32_t> component_ids() const noexcept { return component_; }
  std::size_t num_components() const noexcept { return num_components_; }

  // Copies with replaced atoms/bonds; used by perception passes.
  MolecularGraph with(std::vector<Atom> atoms, std::vector<Bond> bonds) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::string source_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<int> heavy_degree_;
  std::vector<std::uint32_t> component_;
  std::size_t num_components_ = 0;
};

}  // namespace molcurr
