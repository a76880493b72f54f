#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molcurr/descriptors.hpp"

namespace molcurr {

enum class Tier : std::uint8_t { T0 = 0, T1, T2, T3, T4 };
inline constexpr std::size_t kNumTiers = 5;

std::string_view to_string(Tier t) noexcept;
std::optional<Tier> parse_tier(std::string_view s) noexcept;

// Clause of the decision procedure that produced a tier.
enum class TierRule : std::uint8_t {
  NoHeteroatoms,     // T0: n_het = 0
  Stereo,            // T4: n_sc > 0
  HighRarity,        // T4: rarity >= threshold
  AromaticPattern,   // T3: arom_sub > s_threshold
  DenseComplexity,   // T3: bertz_ct / n_ha > threshold and n_ring >= min rings
  CommonGroups,      // T1: n_fg <= fg_low, all groups in top-k
  MultiGroup,        // T2: fg_mid_lo <= n_fg <= fg_mid_hi, arom_sub <= s_threshold
  FallbackFewGroups, // T2: nothing matched, n_fg <= fg_mid_hi
  FallbackManyGroups // T3: nothing matched, n_fg > fg_mid_hi
};

std::string_view to_string(TierRule r) noexcept;

struct TierConfig {
  double rarity_threshold = 0.9;
  std::size_t top_k = 6;
  int s_threshold = 4;
  double ct_per_ha_threshold = 50.0;
  int min_rings_t3 = 3;
  int fg_low = 2;
  int fg_mid_lo = 3;
  int fg_mid_hi = 5;

  // Throws std::invalid_argument when thresholds are inconsistent.
  void validate() const;
};

struct TierLabel {
  Tier tier = Tier::T0;
  TierRule rule = TierRule::NoHeteroatoms;
  bool operator==(const TierLabel &) const = default;
};

// First match in order T0, T4, T3, T1, T2, fallback. `top_groups` must be
// sorted (it is searched with binary search).
TierLabel assign_tier(const DescriptorRecord &record, const std::vector<std::string> &top_groups,
                      const TierConfig &cfg = {});

using TierHistogram = std::array<std::uint64_t, kNumTiers>;

TierHistogram tier_histogram(const std::vector<TierLabel> &labels);
TierHistogram tier_histogram(const std::vector<Tier> &tiers);

}  // namespace molcurr
