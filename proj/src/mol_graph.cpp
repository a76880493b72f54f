#include "molcurr/mol_graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <set>

#include "molcurr/element.hpp"

namespace molcurr {

StructuralCounts structural_counts(const MolecularGraph &g) {
  StructuralCounts c;
  const double h_mass = element(kHydrogen).mass;
  for (const auto &a : g.atoms()) {
    c.mw += element(a.element).mass + h_mass * a.attached_h();
    if (a.is_hydrogen()) continue;
    ++c.n_ha;
    if (a.element != kCarbon) ++c.n_het;
    if (a.chirality != Chirality::None) ++c.n_sc;
  }
  c.n_ring = static_cast<int>(g.num_bonds()) - static_cast<int>(g.num_atoms()) +
             static_cast<int>(g.num_components());

  auto has_marked_single = [&](AtomIndex atom, BondIndex skip) {
    for (const auto &nb : g.neighbors(atom)) {
      if (nb.bond == skip) continue;
      const Bond &b = g.bond(nb.bond);
      if (b.order == BondOrder::Single && b.stereo != BondStereo::None) return true;
    }
    return false;
  };
  for (BondIndex bi = 0; bi < g.num_bonds(); ++bi) {
    const Bond &b = g.bond(bi);
    if (b.order == BondOrder::Double && has_marked_single(b.begin, bi) &&
        has_marked_single(b.end, bi))
      ++c.n_sc;
  }
  return c;
}

namespace {

// All shortest u->v paths avoiding bond `skip`, restricted to heavy atoms,
// with at most `max_atoms` atoms on the path.
void shortest_cycles_through(const MolecularGraph &g, BondIndex skip, std::size_t max_atoms,
                             std::vector<Ring> &out) {
  const Bond &b = g.bond(skip);
  const AtomIndex src = b.begin, dst = b.end;
  std::vector<int> dist(g.num_atoms(), -1);
  std::vector<AtomIndex> frontier{src}, next;
  dist[src] = 0;
  const int limit = static_cast<int>(max_atoms) - 1;
  bool found = false;
  for (int depth = 0; depth < limit && !found && !frontier.empty(); ++depth) {
    next.clear();
    for (AtomIndex a : frontier) {
      for (const auto &nb : g.neighbors(a)) {
        if (nb.bond == skip || g.atom(nb.atom).is_hydrogen()) continue;
        if (dist[nb.atom] == -1) {
          dist[nb.atom] = depth + 1;
          next.push_back(nb.atom);
          if (nb.atom == dst) found = true;
        }
      }
    }
    frontier.swap(next);
  }
  if (!found) return;

  // Walk back from dst through strictly decreasing distances.
  Ring path{dst};
  auto walk = [&](auto &&self, AtomIndex at) -> void {
    if (at == src) {
      Ring cycle(path.rbegin(), path.rend());
      out.push_back(std::move(cycle));
      return;
    }
    for (const auto &nb : g.neighbors(at)) {
      if (nb.bond == skip) continue;
      if (dist[nb.atom] == dist[at] - 1) {
        path.push_back(nb.atom);
        self(self, nb.atom);
        path.pop_back();
      }
    }
  };
  walk(walk, dst);
}

}  // namespace

std::vector<Ring> small_rings(const MolecularGraph &g, std::size_t max_size) {
  std::vector<Ring> candidates;
  for (BondIndex bi = 0; bi < g.num_bonds(); ++bi) {
    const Bond &b = g.bond(bi);
    if (g.atom(b.begin).is_hydrogen() || g.atom(b.end).is_hydrogen()) continue;
    if (g.heavy_degree(b.begin) < 2 || g.heavy_degree(b.end) < 2) continue;
    shortest_cycles_through(g, bi, max_size, candidates);
  }
  std::vector<Ring> rings;
  std::set<std::vector<AtomIndex>> seen;
  for (auto &ring : candidates) {
    std::vector<AtomIndex> key = ring;
    std::sort(key.begin(), key.end());
    if (seen.insert(std::move(key)).second) rings.push_back(std::move(ring));
  }
  return rings;
}

MolecularGraph perceive_aromaticity(const MolecularGraph &g) {
  std::vector<Ring> rings;
  for (auto &r : small_rings(g, 6))
    if (r.size() == 6) rings.push_back(std::move(r));
  if (rings.empty()) return g;

  std::vector<Atom> atoms(g.atoms().begin(), g.atoms().end());
  std::vector<Bond> bonds(g.bonds().begin(), g.bonds().end());

  auto ring_bonds = [&](const Ring &r) {
    std::array<BondIndex, 6> out{};
    for (std::size_t i = 0; i < 6; ++i) out[i] = *g.bond_between(r[i], r[(i + 1) % 6]);
    return out;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &ring : rings) {
      const auto rb = ring_bonds(ring);
      bool all_aromatic = true;
      for (auto bi : rb) all_aromatic &= bonds[bi].order == BondOrder::Aromatic;
      bool atoms_aromatic = true;
      for (auto a : ring) atoms_aromatic &= atoms[a].aromatic;
      if (all_aromatic && atoms_aromatic) continue;

      bool eligible = true;
      for (auto a : ring) eligible &= atoms[a].element == 6 || atoms[a].element == 7;
      if (!eligible) continue;

      bool alternating = false;
      for (int parity = 0; parity < 2 && !alternating; ++parity) {
        bool ok = true;
        for (std::size_t i = 0; i < 6 && ok; ++i) {
          const BondOrder o = bonds[rb[i]].order;
          if (o == BondOrder::Aromatic) continue;
          const bool want_double = static_cast<int>(i % 2) == parity;
          ok = want_double ? o == BondOrder::Double : o == BondOrder::Single;
        }
        alternating = ok;
      }
      if (!alternating) continue;
      for (auto a : ring) atoms[a].aromatic = true;
      for (auto bi : rb) {
        bonds[bi].order = BondOrder::Aromatic;
        bonds[bi].stereo = BondStereo::None;
      }
      changed = true;
    }
  }
  return g.with(std::move(atoms), std::move(bonds));
}

namespace {

ScaffoldResult finish_scaffold(const MolecularGraph &g, const std::vector<bool> &core) {
  std::vector<bool> keep = core;
  for (AtomIndex a = 0; a < g.num_atoms(); ++a) {
    if (core[a] || g.atom(a).is_hydrogen()) continue;
    for (const auto &nb : g.neighbors(a)) {
      if (core[nb.atom] && g.bond(nb.bond).order == BondOrder::Double) {
        keep[a] = true;
        break;
      }
    }
  }
  ScaffoldResult r;
  for (AtomIndex a = 0; a < g.num_atoms(); ++a)
    if (keep[a]) r.scaffold_atoms.push_back(a);
  r.n_scaffold = static_cast<int>(r.scaffold_atoms.size());
  r.is_empty = r.scaffold_atoms.empty();
  return r;
}

}  // namespace

ScaffoldResult murcko_scaffold(const MolecularGraph &g) {
  const std::size_t n = g.num_atoms();
  std::vector<int> deg(n);
  std::vector<bool> core(n, false);
  std::deque<AtomIndex> queue;
  for (AtomIndex a = 0; a < n; ++a) {
    if (g.atom(a).is_hydrogen()) continue;
    core[a] = true;
    deg[a] = g.heavy_degree(a);
    if (deg[a] <= 1) queue.push_back(a);
  }
  while (!queue.empty()) {
    const AtomIndex a = queue.front();
    queue.pop_front();
    if (!core[a]) continue;
    core[a] = false;
    for (const auto &nb : g.neighbors(a)) {
      if (!core[nb.atom]) continue;
      if (--deg[nb.atom] == 1) queue.push_back(nb.atom);
    }
  }
  return finish_scaffold(g, core);
}

ScaffoldResult murcko_scaffold_pruned(const MolecularGraph &g,
                                      const std::vector<AtomIndex> &visit_order) {
  const std::size_t n = g.num_atoms();
  std::vector<bool> core(n, false);
  for (AtomIndex a = 0; a < n; ++a) core[a] = !g.atom(a).is_hydrogen();
  auto live_degree = [&](AtomIndex a) {
    int d = 0;
    for (const auto &nb : g.neighbors(a)) d += core[nb.atom] ? 1 : 0;
    return d;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (AtomIndex a : visit_order) {
      if (core[a] && live_degree(a) <= 1) {
        core[a] = false;
        changed = true;
      }
    }
  }
  return finish_scaffold(g, core);
}

std::vector<std::vector<AtomIndex>> conjugated_components(const MolecularGraph &g) {
  const std::size_t n = g.num_atoms();
  std::vector<bool> has_pi(n, false);
  for (const auto &b : g.bonds()) {
    if (b.is_pi()) has_pi[b.begin] = has_pi[b.end] = true;
  }
  std::vector<AtomIndex> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](AtomIndex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<bool> touched(n, false);
  for (const auto &b : g.bonds()) {
    const bool conjugated = b.is_pi() || (has_pi[b.begin] && has_pi[b.end]);
    if (!conjugated) continue;
    touched[b.begin] = touched[b.end] = true;
    const AtomIndex ra = find(b.begin), rb = find(b.end);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::vector<AtomIndex>> comps;
  std::vector<int> slot(n, -1);
  for (AtomIndex a = 0; a < n; ++a) {
    if (!touched[a]) continue;
    const AtomIndex r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[slot[r]].push_back(a);
  }
  return comps;
}

}  // namespace molcurr
