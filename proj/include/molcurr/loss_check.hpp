#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molcurr/losses.hpp"

namespace molcurr {

enum class LossKind { NtXent, Siglip, Hybrid };

struct GradCheckConfig {
  std::uint64_t first_seed = 0;
  int seeds = 100;
  std::vector<int> batch_sizes{2, 4, 8};
  std::vector<int> dims{4, 8};
  int teacher_dim = 16;
  double eps = 1e-5;
  // Relative error |a - n| / max(|a|, |n|, floor); the floor keeps entries
  // whose true derivative is ~0 from dividing rounding noise by ~0.
  double floor = 1e-3;
  double tolerance = 1e-5;
  NtXentOptions nt_xent;
  HybridOptions hybrid;
};

struct GradCheckSummary {
  LossKind kind = LossKind::NtXent;
  std::size_t cases = 0;
  std::size_t entries = 0;
  std::size_t failures = 0;
  double max_rel_error = 0.0;
  std::string worst;  // description of the worst entry
  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

GradCheckSummary check_gradients(LossKind kind, const GradCheckConfig &cfg = {});

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// |hybrid - siglip(V, V)| with proj(G) = V and head(v) = y exactly.
double hybrid_identity_gap(std::uint64_t seed, int n, int d);

// max(|rho - 1|, |r - 1|) for B = A and for B = A Q with Q orthogonal.
double correlation_identity_gap(std::uint64_t seed, int n, int d, std::size_t n_pairs, bool rotate);

// Gradient checks plus the closed-form and property checks of the loss and
// correlation kernels. Used by the `loss-check` subcommand.
std::vector<CheckResult> run_loss_suite(const GradCheckConfig &cfg = {});

// Random row-normalized matrix from a seeded Gaussian.
Embedding<double> random_normalized(std::uint64_t seed, int n, int d);
Embedding<double> random_gaussian(std::uint64_t seed, int n, int d);

}  // namespace molcurr
