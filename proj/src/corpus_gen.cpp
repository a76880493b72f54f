#include "molcurr/corpus_gen.hpp"

#include <array>
#include <random>
#include <string_view>

#include <fmt/format.h>

namespace molcurr {

namespace {

struct RingTemplate {
  std::array<std::string_view, 6> atoms;
  int size;
  // Bit i set: atom i accepts a substituent.
  unsigned substitutable;
};

constexpr std::array<RingTemplate, 12> kRings{{
    {{"c", "c", "c", "c", "c", "c"}, 6, 0b111111},  // benzene
    {{"c", "c", "n", "c", "c", "c"}, 6, 0b111011},  // pyridine
    {{"c", "n", "c", "n", "c", "c"}, 6, 0b110101},  // pyrimidine
    {{"c", "c", "s", "c", "c", ""}, 5, 0b11011},    // thiophene
    {{"c", "c", "o", "c", "c", ""}, 5, 0b11011},    // furan
    {{"c", "n", "c", "[nH]", "c", ""}, 5, 0b10101}, // imidazole
    {{"C", "C", "C", "C", "C", "C"}, 6, 0b111111},  // cyclohexane
    {{"C", "C", "N", "C", "C", "C"}, 6, 0b111111},  // piperidine
    {{"C", "C", "O", "C", "C", "N"}, 6, 0b111011},  // morpholine
    {{"C", "C", "N", "C", "C", "N"}, 6, 0b111111},  // piperazine
    {{"C", "C", "C", "", "", ""}, 3, 0b111},        // cyclopropane
    {{"C", "C", "O", "C", "C", ""}, 5, 0b11011},    // tetrahydrofuran
}};

constexpr std::array<std::string_view, 18> kSubstituents{
    "C",       "CC",        "F",         "Cl",          "Br",       "OC",
    "N",       "C(=O)O",    "C#N",       "[N+](=O)[O-]", "O",        "C(F)(F)F",
    "S(=O)(=O)N", "C(=O)N",  "C(C)C",     "OCC",         "N(C)C",    "C(=O)OC"};

constexpr std::array<std::string_view, 5> kStereoSubstituents{
    "[C@H](C)O", "[C@@H](N)C", "[C@H](F)C(=O)O", "/C=C/C", "[C@@H](O)CC"};

constexpr std::array<std::string_view, 12> kLinkers{
    "", "C", "CC", "C(=O)N", "NC(=O)", "O", "OC", "S(=O)(=O)N", "N", "C=C", "CCN", "C(=O)"};

constexpr std::array<std::string_view, 9> kHeads{
    "", "", "C", "CC", "CCO", "N", "OC(=O)", "CN(C)C", "CC(C)"};

class Builder {
 public:
  Builder(const CorpusGenOptions &opt, std::uint64_t seed) : opt_(opt), rng_(seed) {}

  std::string molecule() {
    out_.clear();
    out_ += pick(kHeads);
    const int units = 1 + static_cast<int>(uniform(static_cast<std::size_t>(opt_.max_ring_units)));
    for (int u = 0; u < units; ++u) {
      if (u > 0) out_ += pick(kLinkers);
      ring();
    }
    if (chance(0.5)) out_ += substituent();
    return out_;
  }

 private:
  template <class Array>
  std::string_view pick(const Array &a) {
    return a[uniform(a.size())];
  }
  std::size_t uniform(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string_view substituent() {
    return chance(opt_.stereo_rate) ? pick(kStereoSubstituents) : pick(kSubstituents);
  }

  std::string next_label() {
    const int label = 1 + static_cast<int>(counter_++ % 99);
    return label < 10 ? std::to_string(label) : fmt::format("%{}", label);
  }

  void ring() {
    const RingTemplate &r = kRings[uniform(kRings.size())];
    const std::string label = next_label();
    for (int i = 0; i < r.size; ++i) {
      out_ += r.atoms[static_cast<std::size_t>(i)];
      if (i == 0) out_ += label;
      // Atom 0 is bonded to the previous unit and atom size-1 continues the
      // chain, so only interior atoms get branches.
      const bool interior = i > 0 && i + 1 < r.size;
      if (interior && ((r.substitutable >> i) & 1u) && chance(opt_.substitution_rate))
        out_ += fmt::format("({})", substituent());
      if (i + 1 == r.size) out_ += label;
    }
  }

  const CorpusGenOptions &opt_;
  std::mt19937_64 rng_;
  std::string out_;
  std::uint64_t counter_ = 0;
};

}  // namespace

std::vector<std::string> generate_corpus(const CorpusGenOptions &opt) {
  Builder builder(opt, opt.seed);
  std::vector<std::string> out;
  out.reserve(opt.count);
  for (std::size_t i = 0; i < opt.count; ++i) out.push_back(builder.molecule());
  return out;
}

}  // namespace molcurr
