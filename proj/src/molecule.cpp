#include "molcurr/molecule.hpp"

#include <algorithm>
#include <numeric>

namespace molcurr {

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                               std::string source)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), source_(std::move(source)) {
  const std::size_t n = atoms_.size();
  for (std::size_t i = 0; i < n; ++i) atoms_[i].index = static_cast<AtomIndex>(i);

  std::vector<std::uint32_t> deg(n, 0);
  for (const auto &b : bonds_) {
    ++deg[b.begin];
    ++deg[b.end];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (BondIndex bi = 0; bi < bonds_.size(); ++bi) {
    const auto &b = bonds_[bi];
    adjacency_[fill[b.begin]++] = {b.end, bi};
    adjacency_[fill[b.end]++] = {b.begin, bi};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
              [](const Neighbor &x, const Neighbor &y) { return x.atom < y.atom; });
  }

  heavy_degree_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &nb : neighbors(static_cast<AtomIndex>(i)))
      if (!atoms_[nb.atom].is_hydrogen()) ++heavy_degree_[i];
  }

  // Union-find for components.
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto &b : bonds_) {
    auto ra = find(b.begin), rb = find(b.end);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  component_.assign(n, 0);
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  num_components_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = find(static_cast<std::uint32_t>(i));
    if (label[r] == UINT32_MAX) label[r] = static_cast<std::uint32_t>(num_components_++);
    component_[i] = label[r];
  }
}

int MolecularGraph::total_h(AtomIndex i) const noexcept {
  int h = atoms_[i].attached_h();
  for (const auto &nb : neighbors(i))
    if (atoms_[nb.atom].is_hydrogen()) ++h;
  return h;
}

std::optional<BondIndex> MolecularGraph::bond_between(AtomIndex a, AtomIndex b) const noexcept {
  for (const auto &nb : neighbors(a))
    if (nb.atom == b) return nb.bond;
  return std::nullopt;
}

MolecularGraph MolecularGraph::with(std::vector<Atom> atoms, std::vector<Bond> bonds) const {
  return MolecularGraph(std::move(atoms), std::move(bonds), source_);
}

}  // namespace molcurr
