#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace molcurr {

struct CorpusGenOptions {
  std::size_t count = 10000;
  std::uint64_t seed = 42;
  int max_ring_units = 3;
  double substitution_rate = 0.25;
  double stereo_rate = 0.05;
};

// Drug-like SMILES assembled from ring units, linkers and substituents.
// Ring-closure labels cycle through 1..99 so the %nn form is exercised.
std::vector<std::string> generate_corpus(const CorpusGenOptions &opt);

}  // namespace molcurr
