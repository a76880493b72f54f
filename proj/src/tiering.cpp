#include "molcurr/tiering.hpp"

#include <algorithm>
#include <stdexcept>

namespace molcurr {

std::string_view to_string(Tier t) noexcept {
  static constexpr std::array<std::string_view, kNumTiers> kNames{"T0", "T1", "T2", "T3", "T4"};
  return kNames[static_cast<std::size_t>(t)];
}

std::optional<Tier> parse_tier(std::string_view s) noexcept {
  if (s.size() != 2 || s[0] != 'T' || s[1] < '0' || s[1] > '4') return std::nullopt;
  return static_cast<Tier>(s[1] - '0');
}

std::string_view to_string(TierRule r) noexcept {
  switch (r) {
    case TierRule::NoHeteroatoms: return "T0:no_heteroatoms";
    case TierRule::Stereo: return "T4:stereo";
    case TierRule::HighRarity: return "T4:high_rarity";
    case TierRule::AromaticPattern: return "T3:aromatic_substitution";
    case TierRule::DenseComplexity: return "T3:dense_complexity";
    case TierRule::CommonGroups: return "T1:common_groups";
    case TierRule::MultiGroup: return "T2:multi_group";
    case TierRule::FallbackFewGroups: return "fallback:T2";
    case TierRule::FallbackManyGroups: return "fallback:T3";
  }
  return "unknown";
}

void TierConfig::validate() const {
  if (!(rarity_threshold > 0.0) || top_k == 0 || s_threshold <= 0 ||
      !(ct_per_ha_threshold > 0.0) || min_rings_t3 <= 0 || fg_low <= 0 || fg_mid_lo <= 0)
    throw std::invalid_argument("tier thresholds must be positive");
  if (!(fg_low < fg_mid_lo && fg_mid_lo <= fg_mid_hi))
    throw std::invalid_argument("tier config needs fg_low < fg_mid_lo <= fg_mid_hi");
}

TierLabel assign_tier(const DescriptorRecord &r, const std::vector<std::string> &top_groups,
                      const TierConfig &cfg) {
  const auto &c = r.counts;
  if (c.n_het == 0) return {Tier::T0, TierRule::NoHeteroatoms};
  if (c.n_sc > 0) return {Tier::T4, TierRule::Stereo};
  if (r.rarity >= cfg.rarity_threshold) return {Tier::T4, TierRule::HighRarity};
  if (r.arom_sub > cfg.s_threshold) return {Tier::T3, TierRule::AromaticPattern};
  if (c.n_ha > 0 && r.bertz_ct / c.n_ha > cfg.ct_per_ha_threshold && c.n_ring >= cfg.min_rings_t3)
    return {Tier::T3, TierRule::DenseComplexity};
  if (r.n_fg <= cfg.fg_low &&
      std::all_of(r.fg_names.begin(), r.fg_names.end(), [&](const std::string &n) {
        return std::binary_search(top_groups.begin(), top_groups.end(), n);
      }))
    return {Tier::T1, TierRule::CommonGroups};
  if (r.n_fg >= cfg.fg_mid_lo && r.n_fg <= cfg.fg_mid_hi && r.arom_sub <= cfg.s_threshold)
    return {Tier::T2, TierRule::MultiGroup};
  if (r.n_fg <= cfg.fg_mid_hi) return {Tier::T2, TierRule::FallbackFewGroups};
  return {Tier::T3, TierRule::FallbackManyGroups};
}

TierHistogram tier_histogram(const std::vector<TierLabel> &labels) {
  TierHistogram h{};
  for (const auto &l : labels) ++h[static_cast<std::size_t>(l.tier)];
  return h;
}

TierHistogram tier_histogram(const std::vector<Tier> &tiers) {
  TierHistogram h{};
  for (auto t : tiers) ++h[static_cast<std::size_t>(t)];
  return h;
}

}  // namespace molcurr
