#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

namespace oracle {

using molcurr::Atom;
using molcurr::Bond;
using molcurr::BondOrder;

namespace {

// Plain adjacency matrix of bond orders (-1 = no bond).
std::vector<std::vector<int>> order_matrix(const MolecularGraph &g) {
  const std::size_t n = g.num_atoms();
  std::vector<std::vector<int>> m(n, std::vector<int>(n, -1));
  for (const auto &b : g.bonds()) m[b.begin][b.end] = m[b.end][b.begin] = static_cast<int>(b.order);
  return m;
}

bool heavy(const MolecularGraph &g, std::uint32_t a) { return g.atom(a).element != 1; }

int heavy_degree(const MolecularGraph &g, std::uint32_t a) {
  int d = 0;
  for (const auto &b : g.bonds()) {
    if (b.begin == a && heavy(g, b.end)) ++d;
    if (b.end == a && heavy(g, b.begin)) ++d;
  }
  return d;
}

}  // namespace

// ---- isomorphism -----------------------------------------------------------

bool isomorphic(const MolecularGraph &a, const MolecularGraph &b) {
  const std::size_t n = a.num_atoms();
  if (n != b.num_atoms() || a.num_bonds() != b.num_bonds()) return false;
  auto label = [](const MolecularGraph &g, std::uint32_t i) {
    const Atom &x = g.atom(i);
    return std::make_tuple(x.element, x.aromatic, x.formal_charge, x.attached_h(), x.isotope.value_or(0),
                           x.chirality != molcurr::Chirality::None, g.degree(i));
  };
  const auto ma = order_matrix(a), mb = order_matrix(b);
  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);

  // Visit atoms of `a` in BFS order so each new atom usually has a mapped neighbour.
  std::vector<std::uint32_t> order;
  std::vector<bool> seen(n, false);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = true;
    order.push_back(s);
    for (std::size_t k = order.size() - 1; k < order.size(); ++k)
      for (const auto &nb : a.neighbors(order[k]))
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          order.push_back(nb.atom);
        }
  }

  std::function<bool(std::size_t)> extend = [&](std::size_t depth) -> bool {
    if (depth == n) return true;
    const std::uint32_t u = order[depth];
    for (std::uint32_t v = 0; v < n; ++v) {
      if (used[v] || label(a, u) != label(b, v)) continue;
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k) {
        const std::uint32_t w = order[k];
        ok = ma[u][w] == mb[v][static_cast<std::size_t>(map[w])];
      }
      if (!ok) continue;
      map[u] = static_cast<int>(v);
      used[v] = true;
      if (extend(depth + 1)) return true;
      used[v] = false;
      map[u] = -1;
    }
    return false;
  };
  return extend(0);
}

MolecularGraph permute(const MolecularGraph &g, const std::vector<std::uint32_t> &perm) {
  std::vector<Atom> atoms(g.num_atoms());
  for (std::size_t i = 0; i < g.num_atoms(); ++i) atoms[perm[i]] = g.atom(static_cast<std::uint32_t>(i));
  std::vector<Bond> bonds;
  for (const auto &b : g.bonds()) {
    Bond c = b;
    c.begin = perm[b.begin];
    c.end = perm[b.end];
    bonds.push_back(c);
  }
  // Shuffle bond order too, deterministically, by reversing.
  std::reverse(bonds.begin(), bonds.end());
  return MolecularGraph(std::move(atoms), std::move(bonds), g.source());
}

// ---- functional groups -----------------------------------------------------

namespace {

bool atom_ok(const MolecularGraph &g, std::uint32_t a, const molcurr::AtomConstraint &c) {
  const Atom &x = g.atom(a);
  if (x.element == 1) return false;
  bool element = false;
  for (const auto &ch : c.choices) {
    const bool el = ch.element == 0 || ch.element == x.element;
    const bool ar = ch.aromatic == molcurr::AromaticRequirement::Any ||
                    (ch.aromatic == molcurr::AromaticRequirement::Aromatic) == x.aromatic;
    element = element || (el && ar);
  }
  if (!element) return false;
  if (c.charge && *c.charge != x.formal_charge) return false;
  int h = x.attached_h(), u = 0;
  for (const auto &b : g.bonds()) {
    if (b.begin != a && b.end != a) continue;
    const std::uint32_t o = b.begin == a ? b.end : b.begin;
    if (g.atom(o).element == 1) ++h;
    if (b.order == BondOrder::Double || b.order == BondOrder::Triple) ++u;
  }
  return c.heavy_degree.contains(heavy_degree(g, a)) && c.hydrogens.contains(h) && c.unsaturation.contains(u);
}

}  // namespace

std::set<std::pair<std::string, std::vector<std::uint32_t>>> fg_embeddings(
    const MolecularGraph &g, const molcurr::PatternLibrary &lib) {
  std::set<std::pair<std::string, std::vector<std::uint32_t>>> out;
  const auto m = order_matrix(g);
  for (const auto &p : lib.patterns()) {
    const std::size_t k = p.atoms.size();
    std::vector<std::vector<std::uint32_t>> cand(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::uint32_t a = 0; a < g.num_atoms(); ++a)
        if (atom_ok(g, a, p.atoms[i])) cand[i].push_back(a);
    std::vector<std::uint32_t> tuple(k);
    std::vector<std::size_t> idx(k, 0);
    if (std::any_of(cand.begin(), cand.end(), [](const auto &c) { return c.empty(); })) continue;
    // Odometer over the Cartesian product of candidate lists.
    while (true) {
      for (std::size_t i = 0; i < k; ++i) tuple[i] = cand[i][idx[i]];
      std::vector<std::uint32_t> sorted = tuple;
      std::sort(sorted.begin(), sorted.end());
      bool ok = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      for (const auto &bc : p.bonds) {
        if (!ok) break;
        const int o = m[tuple[bc.a]][tuple[bc.b]];
        ok = o >= 0 && bc.accepts(static_cast<BondOrder>(o));
      }
      if (ok) out.emplace(p.name, tuple);
      std::size_t pos = 0;
      while (pos < k && ++idx[pos] == cand[pos].size()) idx[pos++] = 0;
      if (pos == k) break;
    }
  }
  return out;
}

std::vector<std::string> fg_names(const MolecularGraph &g, const molcurr::PatternLibrary &lib) {
  std::set<std::string> names;
  for (const auto &[name, tuple] : fg_embeddings(g, lib)) names.insert(name);
  return {names.begin(), names.end()};
}

double rarity(const std::vector<std::string> &names, const molcurr::PrevalenceTable &table) {
  if (names.empty()) return 0.0;
  double s = 0;
  for (const auto &n : names) s += 1.0 - table.prevalence.at(n);
  return s / static_cast<double>(names.size());
}

// ---- descriptors -------------------------------------------------------------

double bertz_ct(const MolecularGraph &g) {
  using Endpoint = std::tuple<int, bool, int>;
  std::map<std::tuple<Endpoint, Endpoint, int>, long> hist;
  for (const auto &b : g.bonds()) {
    if (!heavy(g, b.begin) || !heavy(g, b.end)) continue;
    Endpoint x{g.atom(b.begin).element, g.atom(b.begin).aromatic, heavy_degree(g, b.begin)};
    Endpoint y{g.atom(b.end).element, g.atom(b.end).aromatic, heavy_degree(g, b.end)};
    if (y < x) std::swap(x, y);
    ++hist[{x, y, static_cast<int>(b.order)}];
  }
  double total = 0;
  for (const auto &[key, n] : hist) total += static_cast<double>(n) * std::log2(static_cast<double>(n));
  const double ne = static_cast<double>(hist.size());
  if (ne > 0) total += ne * std::log2(ne);
  return 0.5 * total;
}

double scaffold_decoration(const MolecularGraph &g) {
  const std::size_t n = g.num_atoms();
  std::vector<bool> alive(n);
  int n_ha = 0;
  for (std::uint32_t a = 0; a < n; ++a) {
    alive[a] = heavy(g, a);
    n_ha += alive[a] ? 1 : 0;
  }
  // Strip live-degree <= 1 atoms one pass at a time until nothing changes.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<bool> next = alive;
    for (std::uint32_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      int d = 0;
      for (const auto &b : g.bonds())
        if ((b.begin == a && alive[b.end]) || (b.end == a && alive[b.begin])) ++d;
      if (d <= 1) {
        next[a] = false;
        changed = true;
      }
    }
    alive = next;
  }
  int kept = 0;
  for (std::uint32_t a = 0; a < n; ++a) {
    bool keep = alive[a];
    for (const auto &b : g.bonds()) {
      if (keep) break;
      if (b.order != BondOrder::Double || !heavy(g, a)) continue;
      if ((b.begin == a && alive[b.end]) || (b.end == a && alive[b.begin])) keep = true;
    }
    kept += keep ? 1 : 0;
  }
  if (kept == 0) return 1.0;
  return 1.0 - static_cast<double>(kept) / n_ha;
}

int conjugation_extent(const MolecularGraph &g) {
  const std::size_t n = g.num_atoms();
  std::vector<bool> pi(n, false);
  for (const auto &b : g.bonds())
    if (b.order != BondOrder::Single) pi[b.begin] = pi[b.end] = true;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto &b : g.bonds()) {
    if (b.order != BondOrder::Single || (pi[b.begin] && pi[b.end])) {
      adj[b.begin].push_back(b.end);
      adj[b.end].push_back(b.begin);
    }
  }
  std::vector<bool> seen(n, false);
  int best = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s] || adj[s].empty()) continue;
    std::vector<std::uint32_t> stack{s};
    seen[s] = true;
    int size = 0;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      ++size;
      for (auto b : adj[a])
        if (!seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
    }
    best = std::max(best, size);
  }
  return best;
}

std::set<std::vector<std::uint32_t>> simple_cycles(const MolecularGraph &g, std::size_t max_size) {
  std::set<std::vector<std::uint32_t>> out;
  const auto m = order_matrix(g);
  const std::uint32_t n = static_cast<std::uint32_t>(g.num_atoms());
  std::vector<std::uint32_t> path;
  std::vector<bool> on(n, false);
  // Cycles whose smallest atom is the start; DFS with all larger atoms.
  std::function<void(std::uint32_t, std::uint32_t)> dfs = [&](std::uint32_t start, std::uint32_t at) {
    for (std::uint32_t nx = start; nx < n; ++nx) {
      if (m[at][nx] < 0 || !heavy(g, nx)) continue;
      if (nx == start && path.size() >= 3) {
        std::vector<std::uint32_t> key = path;
        std::sort(key.begin(), key.end());
        out.insert(key);
        continue;
      }
      if (on[nx] || nx == start || path.size() >= max_size) continue;
      on[nx] = true;
      path.push_back(nx);
      dfs(start, nx);
      path.pop_back();
      on[nx] = false;
    }
  };
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!heavy(g, s)) continue;
    path = {s};
    on[s] = true;
    dfs(s, s);
    on[s] = false;
  }
  return out;
}

namespace {

// True when the atom set forms a cycle that uses bond (u, v): both in set and adjacent.
bool contains_bond(const std::vector<std::uint32_t> &cycle, std::uint32_t u, std::uint32_t v) {
  return std::binary_search(cycle.begin(), cycle.end(), u) && std::binary_search(cycle.begin(), cycle.end(), v);
}

}  // namespace

std::set<std::vector<std::uint32_t>> shortest_cycles_union(const MolecularGraph &g, std::size_t max_size) {
  // Cycles are keyed by atom set; a set of a simple cycle with chords could
  // contain a bond without traversing it, so each cycle's own bond list is
  // rebuilt from the DFS instead.
  std::set<std::vector<std::uint32_t>> out;
  const auto m = order_matrix(g);
  const std::uint32_t n = static_cast<std::uint32_t>(g.num_atoms());
  std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::pair<std::uint32_t, std::uint32_t>>>> cycles;
  std::vector<std::uint32_t> path;
  std::vector<bool> on(n, false);
  std::function<void(std::uint32_t, std::uint32_t)> dfs = [&](std::uint32_t start, std::uint32_t at) {
    for (std::uint32_t nx = start; nx < n; ++nx) {
      if (m[at][nx] < 0 || !heavy(g, nx)) continue;
      if (nx == start && path.size() >= 3) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::size_t i = 0; i < path.size(); ++i) {
          auto u = path[i], v = path[(i + 1) % path.size()];
          edges.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::vector<std::uint32_t> key = path;
        std::sort(key.begin(), key.end());
        cycles.emplace_back(key, edges);
        continue;
      }
      if (on[nx] || nx == start || path.size() >= max_size) continue;
      on[nx] = true;
      path.push_back(nx);
      dfs(start, nx);
      path.pop_back();
      on[nx] = false;
    }
  };
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!heavy(g, s)) continue;
    path = {s};
    on[s] = true;
    dfs(s, s);
    on[s] = false;
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> shortest;
  for (const auto &[key, edges] : cycles)
    for (const auto &e : edges) {
      auto it = shortest.find(e);
      if (it == shortest.end() || key.size() < it->second) shortest[e] = key.size();
    }
  for (const auto &[key, edges] : cycles)
    for (const auto &e : edges)
      if (shortest[e] == key.size() && contains_bond(key, e.first, e.second)) {
        out.insert(key);
        break;
      }
  return out;
}

int aromatic_substitution(const MolecularGraph &g) {
  const auto m = order_matrix(g);
  std::set<std::vector<int>> patterns;  // canonical bit strings
  int total = 0;
  // Each ring is needed in cyclic order; recover it from the atom set by walking.
  for (const auto &set : shortest_cycles_union(g, 8)) {
    std::vector<std::uint32_t> ring{set.front()};
    std::vector<bool> in(set.size(), false);
    in[0] = true;
    while (ring.size() < set.size()) {
      bool moved = false;
      for (std::size_t i = 0; i < set.size() && !moved; ++i)
        if (!in[i] && m[ring.back()][set[i]] >= 0) {
          in[i] = true;
          ring.push_back(set[i]);
          moved = true;
        }
      if (!moved) break;
    }
    if (ring.size() != set.size() || m[ring.back()][ring.front()] < 0) continue;
    bool aromatic = true;
    for (std::size_t i = 0; i < ring.size(); ++i)
      aromatic = aromatic && g.atom(ring[i]).aromatic &&
                 m[ring[i]][ring[(i + 1) % ring.size()]] == static_cast<int>(BondOrder::Aromatic);
    if (!aromatic) continue;
    const std::size_t k = ring.size();
    std::vector<int> bits(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::uint32_t o = 0; o < g.num_atoms(); ++o)
        if (m[ring[i]][o] >= 0 && heavy(g, o) && !std::binary_search(set.begin(), set.end(), o)) bits[i] = 1;
    const int subs = std::accumulate(bits.begin(), bits.end(), 0);
    total += subs;
    if (subs == 0) continue;
    // Canonical form: lexicographic maximum over all 2k dihedral images of
    // the bit string; independent of the gap-sequence formulation.
    std::vector<int> best;
    for (int dir = 0; dir < 2; ++dir)
      for (std::size_t r = 0; r < k; ++r) {
        std::vector<int> img(k);
        for (std::size_t i = 0; i < k; ++i) img[i] = dir == 0 ? bits[(r + i) % k] : bits[(r + k - i) % k];
        if (img > best) best = img;
      }
    patterns.insert(best);
  }
  return static_cast<int>(patterns.size()) + total;
}

// ---- ranks ----------------------------------------------------------------------

std::vector<double> ranks(const std::vector<double> &x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, ties = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) less += 1;
      if (j != i && x[j] == x[i]) ties += 1;
    }
    r[i] = 1 + less + ties / 2;
  }
  return r;
}

double pearson(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double> &x, const std::vector<double> &y) { return pearson(ranks(x), ranks(y)); }

}  // namespace oracle
