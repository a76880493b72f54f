#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molcurr/fraction.hpp"
#include "molcurr/tiering.hpp"

namespace molcurr {

enum class Regime : std::uint8_t { Additive, Staged10, Mixed, Standard, Anti };

std::string_view to_string(Regime r) noexcept;
std::optional<Regime> parse_regime(std::string_view s) noexcept;

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduleSpec {
  Regime regime = Regime::Staged10;
  int epochs = 10;
  Fraction hard_start{1, 10};
  std::uint64_t seed = 0;

  // Throws ScheduleError on E < 1 or hard_start outside [0, 1].
  void validate() const;
};

using TierSet = std::array<bool, kNumTiers>;
using TierWeights = std::array<Fraction, kNumTiers>;
using TierCounts = std::array<std::uint64_t, kNumTiers>;

// Throws ScheduleError("EpochOutOfRange") / ("Staged10RequiresTenEpochs").
// For the mixed regime every tier is active (with weights below).
TierSet active_tiers(Regime regime, int epoch, int epochs);

// rho(T0) = rho(T1) = 1; complex tiers ramp linearly from hard_start to 1.
// With a single epoch the ramp is degenerate and every weight is 1.
TierWeights tier_weights_mixed(int epoch, int epochs, const Fraction &hard_start);

// Per-tier molecule IDs, each list strictly ascending.
struct TierIndex {
  std::array<std::vector<std::uint64_t>, kNumTiers> ids;

  void add(std::uint64_t id, Tier t) { ids[static_cast<std::size_t>(t)].push_back(id); }
  // Sorts and checks for duplicate IDs across tiers (throws ScheduleError).
  void finalize();
  TierCounts counts() const;
  std::uint64_t size() const;
};

// Counter-based uniform in [0, 1) from (seed, id, epoch).
double mixed_uniform(std::uint64_t seed, std::uint64_t id, int epoch) noexcept;

struct EpochManifest {
  int epoch = 0;
  TierSet active{};
  TierWeights weights{};
  std::vector<std::uint64_t> sampled_ids;  // ascending
  std::size_t size() const noexcept { return sampled_ids.size(); }
};

// Tiers are filtered concurrently (up to `workers` threads) and merged by ID.
EpochManifest sample_epoch(const TierIndex &index, const ScheduleSpec &spec, int epoch,
                           unsigned workers = 1);

// Exact molecule-view totals; the mixed regime yields the rational expectation.
Fraction budget(const TierCounts &counts, const ScheduleSpec &spec);
Fraction epoch_budget(const TierCounts &counts, const ScheduleSpec &spec, int epoch);
std::uint64_t baseline_budget(const TierCounts &counts, int epochs);

// epoch_XX.jsonl files plus summary.json in `dir`; returns per-epoch sizes.
std::vector<std::uint64_t> write_manifests(const TierIndex &index, const ScheduleSpec &spec,
                                           const std::filesystem::path &dir, unsigned workers = 1);

}  // namespace molcurr
