#include "molcurr/scheduler.hpp"

#include <algorithm>
#include <fstream>
#include <future>

#include <fmt/format.h>
#include <json.hpp>

namespace molcurr {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Additive: return "additive";
    case Regime::Staged10: return "staged10";
    case Regime::Mixed: return "mixed";
    case Regime::Standard: return "standard";
    case Regime::Anti: return "anti";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view s) noexcept {
  for (auto r : {Regime::Additive, Regime::Staged10, Regime::Mixed, Regime::Standard, Regime::Anti})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

void ScheduleSpec::validate() const {
  if (epochs < 1) throw ScheduleError("InvalidSchedule: epochs must be >= 1");
  if (hard_start < Fraction(0) || hard_start > Fraction(1))
    throw ScheduleError("InvalidSchedule: hard_start must lie in [0, 1]");
  if (regime == Regime::Staged10 && epochs != 10)
    throw ScheduleError("Staged10RequiresTenEpochs");
}

TierSet active_tiers(Regime regime, int epoch, int epochs) {
  if (epochs < 1 || epoch < 0 || epoch >= epochs)
    throw ScheduleError(fmt::format("EpochOutOfRange: epoch {} not in [0, {})", epoch, epochs));
  TierSet set{};
  auto prefix = [&](int last) {
    for (int t = 0; t <= last; ++t) set[t] = true;
  };
  switch (regime) {
    case Regime::Additive:
      prefix(std::min(epoch, 4));
      break;
    case Regime::Staged10: {
      if (epochs != 10) throw ScheduleError("Staged10RequiresTenEpochs");
      static constexpr std::array<int, 10> kLast{1, 1, 1, 2, 2, 3, 3, 3, 4, 4};
      prefix(kLast[epoch]);
      break;
    }
    case Regime::Standard:
      prefix(std::min(4, epoch * 5 / epochs));
      break;
    case Regime::Anti: {
      const int stage = std::min(4, epoch * 5 / epochs);
      for (int t = 4 - stage; t <= 4; ++t) set[t] = true;
      break;
    }
    case Regime::Mixed:
      set.fill(true);
      break;
  }
  return set;
}

TierWeights tier_weights_mixed(int epoch, int epochs, const Fraction &hard_start) {
  if (epochs < 1 || epoch < 0 || epoch >= epochs)
    throw ScheduleError(fmt::format("EpochOutOfRange: epoch {} not in [0, {})", epoch, epochs));
  TierWeights w;
  w.fill(Fraction(1));
  if (epochs == 1) return w;
  const Fraction rho = hard_start + (Fraction(1) - hard_start) * Fraction(epoch, epochs - 1);
  w[2] = w[3] = w[4] = rho;
  return w;
}

void TierIndex::finalize() {
  std::vector<std::uint64_t> all;
  for (auto &v : ids) {
    std::sort(v.begin(), v.end());
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw ScheduleError("DuplicateMoleculeId: an ID appears more than once in the tier index");
}

TierCounts TierIndex::counts() const {
  TierCounts c{};
  for (std::size_t t = 0; t < kNumTiers; ++t) c[t] = ids[t].size();
  return c;
}

std::uint64_t TierIndex::size() const {
  std::uint64_t n = 0;
  for (const auto &v : ids) n += v.size();
  return n;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

double mixed_uniform(std::uint64_t seed, std::uint64_t id, int epoch) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ id);
  h = splitmix64(h ^ static_cast<std::uint64_t>(epoch));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

EpochManifest sample_epoch(const TierIndex &index, const ScheduleSpec &spec, int epoch,
                           unsigned workers) {
  spec.validate();
  EpochManifest m;
  m.epoch = epoch;
  m.active = active_tiers(spec.regime, epoch, spec.epochs);
  if (spec.regime == Regime::Mixed) {
    m.weights = tier_weights_mixed(epoch, spec.epochs, spec.hard_start);
  } else {
    for (std::size_t t = 0; t < kNumTiers; ++t) m.weights[t] = Fraction(m.active[t] ? 1 : 0);
  }

  auto filter = [&](std::size_t t) {
    const auto &src = index.ids[t];
    if (!m.active[t]) return std::vector<std::uint64_t>{};
    if (m.weights[t] == Fraction(1)) return src;
    const double rho = m.weights[t].to_double();
    std::vector<std::uint64_t> out;
    for (auto id : src)
      if (mixed_uniform(spec.seed, id, epoch) < rho) out.push_back(id);
    return out;
  };

  std::array<std::vector<std::uint64_t>, kNumTiers> parts;
  if (workers > 1) {
    std::array<std::future<std::vector<std::uint64_t>>, kNumTiers> futures;
    for (std::size_t t = 0; t < kNumTiers; ++t) futures[t] = std::async(std::launch::async, filter, t);
    for (std::size_t t = 0; t < kNumTiers; ++t) parts[t] = futures[t].get();
  } else {
    for (std::size_t t = 0; t < kNumTiers; ++t) parts[t] = filter(t);
  }

  std::size_t total = 0;
  for (const auto &p : parts) total += p.size();
  m.sampled_ids.reserve(total);
  for (const auto &p : parts) {
    const auto mid = m.sampled_ids.size();
    m.sampled_ids.insert(m.sampled_ids.end(), p.begin(), p.end());
    std::inplace_merge(m.sampled_ids.begin(), m.sampled_ids.begin() + static_cast<std::ptrdiff_t>(mid),
                       m.sampled_ids.end());
  }
  return m;
}

Fraction epoch_budget(const TierCounts &counts, const ScheduleSpec &spec, int epoch) {
  const TierSet active = active_tiers(spec.regime, epoch, spec.epochs);
  Fraction total(0);
  if (spec.regime == Regime::Mixed) {
    const auto w = tier_weights_mixed(epoch, spec.epochs, spec.hard_start);
    for (std::size_t t = 0; t < kNumTiers; ++t)
      total += w[t] * Fraction(static_cast<std::int64_t>(counts[t]));
    return total;
  }
  for (std::size_t t = 0; t < kNumTiers; ++t)
    if (active[t]) total += Fraction(static_cast<std::int64_t>(counts[t]));
  return total;
}

Fraction budget(const TierCounts &counts, const ScheduleSpec &spec) {
  spec.validate();
  Fraction total(0);
  for (int e = 0; e < spec.epochs; ++e) total += epoch_budget(counts, spec, e);
  return total;
}

std::uint64_t baseline_budget(const TierCounts &counts, int epochs) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n * static_cast<std::uint64_t>(epochs);
}

std::vector<std::uint64_t> write_manifests(const TierIndex &index, const ScheduleSpec &spec,
                                           const std::filesystem::path &dir, unsigned workers) {
  spec.validate();
  std::filesystem::create_directories(dir);
  const std::string regime(to_string(spec.regime));
  std::vector<std::uint64_t> sizes;
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  std::uint64_t cumulative = 0;
  for (int e = 0; e < spec.epochs; ++e) {
    const EpochManifest m = sample_epoch(index, spec, e, workers);
    const auto path = dir / fmt::format("epoch_{:02d}.jsonl", e);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::string buf;
    for (auto id : m.sampled_ids) {
      buf.clear();
      fmt::format_to(std::back_inserter(buf), "{{\"epoch\":{},\"regime\":\"{}\",\"id\":{}}}\n", e,
                     regime, id);
      out << buf;
    }
    cumulative += m.size();
    sizes.push_back(m.size());
    nlohmann::ordered_json entry;
    entry["epoch"] = e;
    nlohmann::ordered_json tiers = nlohmann::ordered_json::object();
    for (std::size_t t = 0; t < kNumTiers; ++t)
      tiers[std::string(to_string(static_cast<Tier>(t)))] = m.weights[t].to_double();
    entry["tier_weights"] = tiers;
    entry["size"] = m.size();
    entry["cumulative"] = cumulative;
    epochs.push_back(entry);
  }
  nlohmann::ordered_json summary;
  summary["regime"] = regime;
  summary["epochs"] = spec.epochs;
  summary["hard_start"] = spec.hard_start.str();
  summary["seed"] = spec.seed;
  summary["corpus_size"] = index.size();
  summary["per_epoch"] = epochs;
  summary["total_views"] = cumulative;
  const auto baseline = baseline_budget(index.counts(), spec.epochs);
  summary["baseline_views"] = baseline;
  summary["ratio"] = baseline == 0 ? 0.0 : static_cast<double>(cumulative) / static_cast<double>(baseline);
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  return sizes;
}

}  // namespace molcurr
