#include "molcurr/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

namespace molcurr {

double scaffold_decoration(const MolecularGraph &graph) {
  int n_ha = 0;
  for (const auto &a : graph.atoms()) n_ha += a.is_hydrogen() ? 0 : 1;
  if (n_ha == 0) throw EmptyMoleculeError();
  const auto scaffold = murcko_scaffold(graph);
  if (scaffold.is_empty) return 1.0;
  const double d = 1.0 - static_cast<double>(scaffold.n_scaffold) / n_ha;
  return std::clamp(d, 0.0, 1.0);
}

double fg_rarity(const std::vector<std::string> &fg_names, const PrevalenceTable &table) {
  if (fg_names.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &name : fg_names) sum += 1.0 - table.at(name);
  return sum / static_cast<double>(fg_names.size());
}

double fg_rarity(const MolecularGraph &graph, const PrevalenceTable &table,
                 const PatternLibrary &library) {
  return fg_rarity(group_names(graph, library), table);
}

int conjugation_extent(const MolecularGraph &graph) {
  std::size_t best = 0;
  for (const auto &c : conjugated_components(graph)) best = std::max(best, c.size());
  return static_cast<int>(best);
}

std::vector<int> ring_gap_pattern(const std::vector<bool> &substituted) {
  const int n = static_cast<int>(substituted.size());
  std::vector<int> positions;
  for (int i = 0; i < n; ++i)
    if (substituted[i]) positions.push_back(i);
  if (positions.empty()) return {};
  const std::size_t k = positions.size();
  std::vector<int> gaps(k);
  for (std::size_t j = 0; j + 1 < k; ++j) gaps[j] = positions[j + 1] - positions[j];
  gaps[k - 1] = n - positions[k - 1] + positions[0];

  std::vector<int> best;
  auto consider = [&](const std::vector<int> &seq) {
    std::vector<int> rot(seq);
    for (std::size_t r = 0; r < k; ++r) {
      std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      if (best.empty() || rot < best) best = rot;
    }
  };
  consider(gaps);
  consider(std::vector<int>(gaps.rbegin(), gaps.rend()));
  return best;
}

int aromatic_substitution_complexity(const MolecularGraph &graph) {
  std::set<std::vector<int>> patterns;
  int substituents = 0;
  for (const auto &ring : small_rings(graph)) {
    bool aromatic = true;
    for (std::size_t i = 0; i < ring.size() && aromatic; ++i) {
      aromatic = graph.atom(ring[i]).aromatic &&
                 graph.bond(*graph.bond_between(ring[i], ring[(i + 1) % ring.size()])).order ==
                     BondOrder::Aromatic;
    }
    if (!aromatic) continue;
    std::vector<bool> substituted(ring.size(), false);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      for (const auto &nb : graph.neighbors(ring[i])) {
        if (graph.atom(nb.atom).is_hydrogen()) continue;
        if (std::find(ring.begin(), ring.end(), nb.atom) == ring.end()) {
          substituted[i] = true;
          break;
        }
      }
      substituents += substituted[i] ? 1 : 0;
    }
    auto pattern = ring_gap_pattern(substituted);
    if (!pattern.empty()) patterns.insert(std::move(pattern));
  }
  return static_cast<int>(patterns.size()) + substituents;
}

double bertz_ct(const MolecularGraph &graph) {
  std::vector<std::uint64_t> keys;
  keys.reserve(graph.num_bonds());
  auto descriptor = [&](AtomIndex a) -> std::uint64_t {
    const Atom &atom = graph.atom(a);
    return (static_cast<std::uint64_t>(atom.element) << 9) |
           (static_cast<std::uint64_t>(atom.aromatic) << 8) |
           static_cast<std::uint64_t>(std::min(graph.heavy_degree(a), 255));
  };
  for (const auto &b : graph.bonds()) {
    if (graph.atom(b.begin).is_hydrogen() || graph.atom(b.end).is_hydrogen()) continue;
    auto x = descriptor(b.begin), y = descriptor(b.end);
    if (x > y) std::swap(x, y);
    keys.push_back((((x << 17) | y) << 2) | static_cast<std::uint64_t>(b.order));
  }
  if (keys.empty()) return 0.0;
  std::sort(keys.begin(), keys.end());
  double sum = 0.0;
  std::size_t n_env = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const double nk = static_cast<double>(j - i);
    sum += nk * std::log2(nk);
    ++n_env;
    i = j;
  }
  const double ne = static_cast<double>(n_env);
  return 0.5 * (sum + ne * std::log2(ne));
}

DescriptorRecord descriptor_record_without_rarity(const MolecularGraph &graph,
                                                  const PatternLibrary &library) {
  const MolecularGraph g = perceive_aromaticity(graph);
  DescriptorRecord r;
  r.counts = structural_counts(g);
  if (r.counts.n_ha == 0) throw EmptyMoleculeError();
  r.d_scaf = scaffold_decoration(g);
  r.conjugation = conjugation_extent(g);
  r.arom_sub = aromatic_substitution_complexity(g);
  r.bertz_ct = bertz_ct(g);
  r.fg_names = group_names(g, library);
  r.n_fg = static_cast<int>(r.fg_names.size());
  return r;
}

DescriptorRecord descriptor_record(const MolecularGraph &graph, const PrevalenceTable &table,
                                   const PatternLibrary &library) {
  DescriptorRecord r = descriptor_record_without_rarity(graph, library);
  r.rarity = fg_rarity(r.fg_names, table);
  return r;
}

}  // namespace molcurr
