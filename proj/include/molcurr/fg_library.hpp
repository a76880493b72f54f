#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molcurr/molecule.hpp"

namespace molcurr {

struct IntRange {
  int lo = 0;
  int hi = std::numeric_limits<int>::max();
  bool contains(int v) const noexcept { return v >= lo && v <= hi; }
};

enum class AromaticRequirement : std::uint8_t { Any, Aromatic, Aliphatic };

struct ElementChoice {
  std::uint8_t element = 0;  // 0 = any heavy element
  AromaticRequirement aromatic = AromaticRequirement::Any;
};

// Per-atom template constraint. `choices` is an OR list; the ranges are
// ANDed. heavy_degree counts non-hydrogen neighbours, hydrogens counts all
// attached H, unsaturation counts incident double/triple bonds.
struct AtomConstraint {
  std::vector<ElementChoice> choices;
  IntRange heavy_degree;
  IntRange hydrogens;
  IntRange unsaturation;
  std::optional<int> charge;

  bool accepts(const MolecularGraph &g, AtomIndex a) const noexcept;
};

// Bit set over BondOrder values.
struct BondConstraint {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t orders = 0;

  bool accepts(BondOrder o) const noexcept {
    return (orders >> static_cast<unsigned>(o)) & 1u;
  }
};

struct FunctionalGroupPattern {
  std::string name;
  int priority = 0;
  std::vector<AtomConstraint> atoms;
  std::vector<BondConstraint> bonds;
  std::string definition;  // the line the pattern was parsed from
};

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses one pattern line:
//   name  priority  atom-tokens...  |  bond-tokens...
// Atom token: comma-separated element choices (uppercase = aliphatic,
// lowercase = aromatic, '*' any heavy, 'A' any aliphatic, 'a' any
// aromatic), then ';key=range' constraints with keys d (heavy degree),
// h (hydrogens), u (double/triple bonds), q (charge). Ranges: "2", "1-3",
// "2-". Bond token: "0=1", "0-1", "0#1", "0:1", "0~1" (any), or a set
// such as "0[-=]2".
FunctionalGroupPattern parse_pattern(std::string_view line);

class PatternLibrary {
 public:
  PatternLibrary() = default;
  explicit PatternLibrary(std::vector<FunctionalGroupPattern> patterns);

  // Reads one pattern per non-empty, non-'#' line.
  static PatternLibrary parse(std::string_view text);
  static PatternLibrary load(const std::string &path);

  // The 31-group library shipped with the project (data/functional_groups.txt).
  static const PatternLibrary &default_library();

  const std::vector<FunctionalGroupPattern> &patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }
  std::vector<std::string> names() const;

 private:
  std::vector<FunctionalGroupPattern> patterns_;
};

extern const std::string_view kDefaultPatternText;

struct GroupMatch {
  std::string_view name;
  std::vector<AtomIndex> atoms;  // pattern atom i -> molecule atom atoms[i]
  bool operator==(const GroupMatch &) const = default;
};

// Every embedding (subgraph monomorphism) of every pattern. Expects an
// aromaticity-perceived graph.
std::vector<GroupMatch> match_groups(const MolecularGraph &graph, const PatternLibrary &library);

// F_m: distinct group names present, sorted by name.
std::vector<std::string> group_names(const MolecularGraph &graph, const PatternLibrary &library);

class EmptyCorpusError : public std::runtime_error {
 public:
  EmptyCorpusError() : std::runtime_error("EmptyCorpus: prevalence needs at least one molecule") {}
};

struct PrevalenceTable {
  std::map<std::string, double> prevalence;
  std::uint64_t corpus_size = 0;

  double at(const std::string &name) const;
  void write(std::ostream &os) const;
  static PrevalenceTable read(std::istream &is);
};

// Mergeable molecule-per-group counters.
class PrevalenceCounter {
 public:
  explicit PrevalenceCounter(const PatternLibrary &library);

  void add(const std::vector<std::string> &present_names);
  void merge(const PrevalenceCounter &other);
  std::uint64_t molecules() const noexcept { return molecules_; }

  // Throws EmptyCorpusError when nothing was added.
  PrevalenceTable table() const;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t molecules_ = 0;
};

PrevalenceTable corpus_prevalence(const std::vector<MolecularGraph> &corpus,
                                  const PatternLibrary &library);

// k largest P(f), ties by name; k is clamped to the table size.
std::vector<std::string> top_k_groups(const PrevalenceTable &table, std::size_t k);

}  // namespace molcurr
