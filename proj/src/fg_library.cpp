#include "molcurr/fg_library.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "molcurr/element.hpp"
#include "molcurr/mol_graph.hpp"

namespace molcurr {

bool AtomConstraint::accepts(const MolecularGraph &g, AtomIndex a) const noexcept {
  const Atom &atom = g.atom(a);
  if (atom.is_hydrogen()) return false;
  bool element_ok = false;
  for (const auto &c : choices) {
    if (c.element != 0 && c.element != atom.element) continue;
    if (c.aromatic == AromaticRequirement::Aromatic && !atom.aromatic) continue;
    if (c.aromatic == AromaticRequirement::Aliphatic && atom.aromatic) continue;
    element_ok = true;
    break;
  }
  if (!element_ok) return false;
  if (charge && *charge != atom.formal_charge) return false;
  if (!heavy_degree.contains(g.heavy_degree(a))) return false;
  if (!hydrogens.contains(g.total_h(a))) return false;
  if (unsaturation.lo > 0 || unsaturation.hi != IntRange{}.hi) {
    int u = 0;
    for (const auto &nb : g.neighbors(a)) {
      const auto o = g.bond(nb.bond).order;
      u += (o == BondOrder::Double || o == BondOrder::Triple) ? 1 : 0;
    }
    if (!unsaturation.contains(u)) return false;
  }
  return true;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view s, std::string_view context) {
  int v = 0;
  const char *first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw PatternError(fmt::format("bad integer '{}' in {}", s, context));
  return v;
}

IntRange parse_range(std::string_view s, std::string_view context) {
  const auto dash = s.find('-');
  if (dash == std::string_view::npos) {
    const int v = parse_int(s, context);
    return {v, v};
  }
  IntRange r;
  r.lo = parse_int(s.substr(0, dash), context);
  if (dash + 1 < s.size()) r.hi = parse_int(s.substr(dash + 1), context);
  if (r.hi < r.lo) throw PatternError(fmt::format("empty range '{}' in {}", s, context));
  return r;
}

ElementChoice parse_choice(std::string_view sym, std::string_view context) {
  if (sym == "*") return {0, AromaticRequirement::Any};
  if (sym == "A") return {0, AromaticRequirement::Aliphatic};
  if (sym == "a") return {0, AromaticRequirement::Aromatic};
  if (sym.empty()) throw PatternError(fmt::format("empty element in {}", context));
  std::string canonical(sym);
  AromaticRequirement arom = AromaticRequirement::Aliphatic;
  if (canonical[0] >= 'a' && canonical[0] <= 'z') {
    canonical[0] = static_cast<char>(canonical[0] - 'a' + 'A');
    arom = AromaticRequirement::Aromatic;
  }
  const ElementInfo *info = find_element(canonical);
  if (!info || info->atomic_number == kHydrogen)
    throw PatternError(fmt::format("unknown heavy element '{}' in {}", sym, context));
  return {info->atomic_number, arom};
}

AtomConstraint parse_atom(std::string_view token) {
  AtomConstraint c;
  const auto parts = split(token, ';');
  for (auto sym : split(parts[0], ',')) c.choices.push_back(parse_choice(sym, token));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw PatternError(fmt::format("constraint '{}' needs key=value", parts[i]));
    const auto key = parts[i].substr(0, eq);
    const auto value = parts[i].substr(eq + 1);
    if (key == "d")
      c.heavy_degree = parse_range(value, token);
    else if (key == "h")
      c.hydrogens = parse_range(value, token);
    else if (key == "u")
      c.unsaturation = parse_range(value, token);
    else if (key == "q")
      c.charge = parse_int(value, token);
    else
      throw PatternError(fmt::format("unknown constraint key '{}'", key));
  }
  return c;
}

std::uint8_t order_bit(char c, std::string_view context) {
  switch (c) {
    case '-': return 1u << static_cast<unsigned>(BondOrder::Single);
    case '=': return 1u << static_cast<unsigned>(BondOrder::Double);
    case '#': return 1u << static_cast<unsigned>(BondOrder::Triple);
    case ':': return 1u << static_cast<unsigned>(BondOrder::Aromatic);
    case '~': return 0x0f;
    default: throw PatternError(fmt::format("bad bond symbol '{}' in {}", c, context));
  }
}

BondConstraint parse_bond(std::string_view token, std::size_t n_atoms) {
  std::size_t i = 0;
  while (i < token.size() && token[i] >= '0' && token[i] <= '9') ++i;
  const int a = parse_int(token.substr(0, i), token);
  std::uint8_t orders = 0;
  if (i < token.size() && token[i] == '[') {
    const auto close = token.find(']', i);
    if (close == std::string_view::npos) throw PatternError(fmt::format("unclosed set in {}", token));
    for (std::size_t k = i + 1; k < close; ++k) orders |= order_bit(token[k], token);
    i = close + 1;
  } else if (i < token.size()) {
    orders = order_bit(token[i], token);
    ++i;
  }
  if (orders == 0) throw PatternError(fmt::format("bond '{}' has no order", token));
  const int b = parse_int(token.substr(i), token);
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n_atoms ||
      static_cast<std::size_t>(b) >= n_atoms || a == b)
    throw PatternError(fmt::format("bond '{}' references invalid atoms", token));
  return {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), orders};
}

}  // namespace

FunctionalGroupPattern parse_pattern(std::string_view line) {
  const auto bar = line.find('|');
  const auto head = tokens(line.substr(0, bar));
  if (head.size() < 3)
    throw PatternError(fmt::format("pattern line needs name, priority and atoms: '{}'", line));
  FunctionalGroupPattern p;
  p.name = std::string(head[0]);
  p.priority = parse_int(head[1], line);
  for (std::size_t i = 2; i < head.size(); ++i) p.atoms.push_back(parse_atom(head[i]));
  if (p.atoms.empty() || p.atoms.size() > 6)
    throw PatternError(fmt::format("pattern '{}' must have 1-6 atoms", p.name));
  if (bar != std::string_view::npos) {
    for (auto tok : tokens(line.substr(bar + 1))) p.bonds.push_back(parse_bond(tok, p.atoms.size()));
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto &b : p.bonds) {
    if (!pairs.insert({std::min(b.a, b.b), std::max(b.a, b.b)}).second)
      throw PatternError(fmt::format("pattern '{}' repeats a bond", p.name));
  }
  // Connectivity: every atom reachable from atom 0.
  std::vector<bool> seen(p.atoms.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto at = stack.back();
    stack.pop_back();
    for (const auto &b : p.bonds) {
      const std::size_t other = b.a == at ? b.b : b.b == at ? b.a : SIZE_MAX;
      if (other != SIZE_MAX && !seen[other]) {
        seen[other] = true;
        stack.push_back(other);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw PatternError(fmt::format("pattern '{}' is not connected", p.name));
  p.definition = std::string(line);
  return p;
}

PatternLibrary::PatternLibrary(std::vector<FunctionalGroupPattern> patterns)
    : patterns_(std::move(patterns)) {
  std::set<std::string> names;
  for (const auto &p : patterns_) {
    if (!names.insert(p.name).second)
      throw PatternError(fmt::format("duplicate pattern name '{}'", p.name));
  }
}

PatternLibrary PatternLibrary::parse(std::string_view text) {
  std::vector<FunctionalGroupPattern> out;
  for (auto line : split(text, '\n')) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    out.push_back(parse_pattern(line.substr(first)));
  }
  return PatternLibrary(std::move(out));
}

PatternLibrary PatternLibrary::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open pattern file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const PatternLibrary &PatternLibrary::default_library() {
  static const PatternLibrary lib = parse(kDefaultPatternText);
  return lib;
}

std::vector<std::string> PatternLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(patterns_.size());
  for (const auto &p : patterns_) out.push_back(p.name);
  return out;
}

namespace {

// Backtracking monomorphism search. Pattern atoms are visited in BFS order
// from atom 0 so every atom after the first has an already-mapped anchor.
class Matcher {
 public:
  Matcher(const MolecularGraph &g, const FunctionalGroupPattern &p) : g_(g), p_(p) {
    const std::size_t n = p.atoms.size();
    std::vector<bool> placed(n, false);
    order_.push_back(0);
    anchor_.push_back(-1);
    placed[0] = true;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      for (const auto &b : p.bonds) {
        const int from = order_[k];
        int to = -1;
        if (b.a == from) to = b.b;
        if (b.b == from) to = b.a;
        if (to >= 0 && !placed[to]) {
          placed[to] = true;
          order_.push_back(to);
          anchor_.push_back(from);
        }
      }
    }
    mapping_.assign(n, UINT32_MAX);
  }

  // Calls `emit` for each embedding; stops early when it returns false.
  template <class Emit>
  void run(Emit &&emit) {
    stop_ = false;
    used_.assign(g_.num_atoms(), false);
    for (AtomIndex a = 0; a < g_.num_atoms() && !stop_; ++a) {
      if (!p_.atoms[order_[0]].accepts(g_, a)) continue;
      place(0, a, emit);
    }
  }

 private:
  bool bonds_ok(int patom, AtomIndex m) const {
    for (const auto &b : p_.bonds) {
      int other = -1;
      if (b.a == patom) other = b.b;
      if (b.b == patom) other = b.a;
      if (other < 0 || mapping_[other] == UINT32_MAX) continue;
      const auto bi = g_.bond_between(m, mapping_[other]);
      if (!bi || !b.accepts(g_.bond(*bi).order)) return false;
    }
    return true;
  }

  template <class Emit>
  void place(std::size_t k, AtomIndex m, Emit &emit) {
    const int patom = order_[k];
    if (!bonds_ok(patom, m)) return;
    mapping_[patom] = m;
    used_[m] = true;
    if (k + 1 == order_.size()) {
      if (!emit(mapping_)) stop_ = true;
    } else {
      const int next = order_[k + 1];
      const AtomIndex anchor_atom = mapping_[anchor_[k + 1]];
      for (const auto &nb : g_.neighbors(anchor_atom)) {
        if (stop_) break;
        if (used_[nb.atom] || !p_.atoms[next].accepts(g_, nb.atom)) continue;
        place(k + 1, nb.atom, emit);
      }
    }
    used_[m] = false;
    mapping_[patom] = UINT32_MAX;
  }

  const MolecularGraph &g_;
  const FunctionalGroupPattern &p_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<AtomIndex> mapping_;
  std::vector<bool> used_;
  bool stop_ = false;
};

}  // namespace

std::vector<GroupMatch> match_groups(const MolecularGraph &graph, const PatternLibrary &library) {
  std::vector<GroupMatch> out;
  for (const auto &p : library.patterns()) {
    Matcher m(graph, p);
    m.run([&](const std::vector<AtomIndex> &mapping) {
      out.push_back({p.name, mapping});
      return true;
    });
  }
  return out;
}

std::vector<std::string> group_names(const MolecularGraph &graph, const PatternLibrary &library) {
  std::vector<std::string> out;
  for (const auto &p : library.patterns()) {
    bool found = false;
    Matcher m(graph, p);
    m.run([&](const std::vector<AtomIndex> &) {
      found = true;
      return false;
    });
    if (found) out.push_back(p.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double PrevalenceTable::at(const std::string &name) const {
  const auto it = prevalence.find(name);
  if (it == prevalence.end())
    throw std::out_of_range(fmt::format("prevalence table has no group '{}'", name));
  return it->second;
}

void PrevalenceTable::write(std::ostream &os) const {
  os << "# corpus_size\t" << corpus_size << '\n';
  os << "group\tprevalence\n";
  for (const auto &[name, p] : prevalence) os << name << '\t' << fmt::format("{}", p) << '\n';
}

PrevalenceTable PrevalenceTable::read(std::istream &is) {
  PrevalenceTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (line[0] == '#') {
      if (fields.size() == 2 && fields[0] == "# corpus_size")
        t.corpus_size = std::stoull(std::string(fields[1]));
      continue;
    }
    if (fields.size() != 2) throw std::runtime_error(fmt::format("bad prevalence row '{}'", line));
    if (fields[0] == "group") continue;
    const double p = std::stod(std::string(fields[1]));
    if (!(p >= 0.0 && p <= 1.0))
      throw std::runtime_error(fmt::format("prevalence outside [0,1] in '{}'", line));
    t.prevalence[std::string(fields[0])] = p;
  }
  return t;
}

PrevalenceCounter::PrevalenceCounter(const PatternLibrary &library) {
  for (const auto &p : library.patterns()) counts_[p.name] = 0;
}

void PrevalenceCounter::add(const std::vector<std::string> &present_names) {
  ++molecules_;
  for (const auto &n : present_names) ++counts_[n];
}

void PrevalenceCounter::merge(const PrevalenceCounter &other) {
  molecules_ += other.molecules_;
  for (const auto &[name, c] : other.counts_) counts_[name] += c;
}

PrevalenceTable PrevalenceCounter::table() const {
  if (molecules_ == 0) throw EmptyCorpusError();
  PrevalenceTable t;
  t.corpus_size = molecules_;
  for (const auto &[name, c] : counts_)
    t.prevalence[name] = static_cast<double>(c) / static_cast<double>(molecules_);
  return t;
}

PrevalenceTable corpus_prevalence(const std::vector<MolecularGraph> &corpus,
                                  const PatternLibrary &library) {
  PrevalenceCounter counter(library);
  for (const auto &g : corpus) counter.add(group_names(perceive_aromaticity(g), library));
  return counter.table();
}

std::vector<std::string> top_k_groups(const PrevalenceTable &table, std::size_t k) {
  std::vector<std::pair<std::string, double>> entries(table.prevalence.begin(),
                                                      table.prevalence.end());
  std::sort(entries.begin(), entries.end(), [](const auto &x, const auto &y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  k = std::min(k, entries.size());
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(entries[i].first);
  return out;
}

}  // namespace molcurr
