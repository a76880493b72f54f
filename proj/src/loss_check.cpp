#include "molcurr/loss_check.hpp"

#include <cmath>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "molcurr/correlation.hpp"

namespace molcurr {

using Mat = Embedding<double>;

Mat random_gaussian(std::uint64_t seed, int n, int d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

Mat random_normalized(std::uint64_t seed, int n, int d) { return normalize_rows(random_gaussian(seed, n, d)); }

namespace {

// A named block of parameters with its analytic gradient.
struct Param {
  std::string name;
  double *value;
  const double *grad;
  Eigen::Index size;
};

struct Checker {
  const GradCheckConfig &cfg;
  GradCheckSummary &summary;

  // `eval` recomputes the loss from the (perturbed) parameters in place.
  void run(const std::vector<Param> &params, const std::function<double()> &eval,
           const std::string &context) {
    ++summary.cases;
    for (const auto &p : params) {
      for (Eigen::Index k = 0; k < p.size; ++k) {
        const double saved = p.value[k];
        p.value[k] = saved + cfg.eps;
        const double up = eval();
        p.value[k] = saved - cfg.eps;
        const double down = eval();
        p.value[k] = saved;
        const double numeric = (up - down) / (2 * cfg.eps);
        const double analytic = p.grad[k];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), cfg.floor});
        const double rel = std::abs(analytic - numeric) / denom;
        ++summary.entries;
        if (rel > cfg.tolerance) ++summary.failures;
        if (summary.worst.empty() || rel > summary.max_rel_error) {
          summary.max_rel_error = rel;
          summary.worst = fmt::format("{} {}[{}]: analytic {:.12g} numeric {:.12g}", context, p.name,
                                      k, analytic, numeric);
        }
      }
    }
  }
};

std::string_view kind_name(LossKind k) {
  switch (k) {
    case LossKind::NtXent: return "nt_xent";
    case LossKind::Siglip: return "siglip";
    case LossKind::Hybrid: return "hybrid";
  }
  return "?";
}

}  // namespace

GradCheckSummary check_gradients(LossKind kind, const GradCheckConfig &cfg) {
  GradCheckSummary summary;
  summary.kind = kind;
  Checker checker{cfg, summary};
  for (int s = 0; s < cfg.seeds; ++s) {
    for (int n : cfg.batch_sizes) {
      for (int d : cfg.dims) {
        const std::uint64_t seed = cfg.first_seed + static_cast<std::uint64_t>(s) * 1000003u +
                                   static_cast<std::uint64_t>(n) * 101u + static_cast<std::uint64_t>(d);
        const std::string ctx = fmt::format("{} seed={} N={} d={}", kind_name(kind), s, n, d);
        std::mt19937_64 rng(seed ^ 0xA5A5A5A5ull);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        switch (kind) {
          case LossKind::NtXent: {
            Mat v1 = random_normalized(seed, n, d), v2 = random_normalized(seed + 1, n, d);
            const auto r = nt_xent(v1, v2, cfg.nt_xent);
            checker.run({{"V1", v1.data(), r.grad_v1.data(), v1.size()},
                         {"V2", v2.data(), r.grad_v2.data(), v2.size()}},
                        [&] { return nt_xent(v1, v2, cfg.nt_xent).loss; }, ctx);
            break;
          }
          case LossKind::Siglip: {
            Mat v = random_normalized(seed, n, d), t = random_normalized(seed + 1, n, d);
            double scale = 1.0 + 0.5 * unit(rng), bias = unit(rng);
            const auto r = siglip_loss(v, t, scale, bias, cfg.hybrid.siglip);
            checker.run({{"V", v.data(), r.grad_v.data(), v.size()},
                         {"T", t.data(), r.grad_t.data(), t.size()},
                         {"s", &scale, &r.grad_scale, 1},
                         {"b", &bias, &r.grad_bias, 1}},
                        [&] { return siglip_loss(v, t, scale, bias, cfg.hybrid.siglip).loss; }, ctx);
            break;
          }
          case LossKind::Hybrid: {
            const int dg = cfg.teacher_dim;
            Mat v = random_normalized(seed, n, d);
            const Mat g = random_gaussian(seed + 1, n, dg);
            LinearMap<double> proj{random_gaussian(seed + 2, d, dg) / std::sqrt(double(dg)),
                                   random_gaussian(seed + 3, d, 1).col(0) * 0.1};
            LinearMap<double> head{random_gaussian(seed + 4, 1, d), random_gaussian(seed + 5, 1, 1).col(0)};
            const Vector<double> y = random_gaussian(seed + 6, n, 1).col(0);
            double scale = 1.0 + 0.5 * unit(rng), bias = unit(rng);
            const auto r = hybrid_loss(v, g, proj, head, y, scale, bias, cfg.hybrid);
            checker.run({{"V", v.data(), r.grad_v.data(), v.size()},
                         {"proj.W", proj.weight.data(), r.grad_proj.weight.data(), proj.weight.size()},
                         {"proj.b", proj.bias.data(), r.grad_proj.bias.data(), proj.bias.size()},
                         {"head.w", head.weight.data(), r.grad_head.weight.data(), head.weight.size()},
                         {"head.c", head.bias.data(), r.grad_head.bias.data(), head.bias.size()},
                         {"s", &scale, &r.grad_scale, 1},
                         {"b", &bias, &r.grad_bias, 1}},
                        [&] { return hybrid_loss(v, g, proj, head, y, scale, bias, cfg.hybrid).loss; },
                        ctx);
            break;
          }
        }
      }
    }
  }
  return summary;
}

double hybrid_identity_gap(std::uint64_t seed, int n, int d) {
  const Mat v = random_normalized(seed, n, d);
  // Permutation projection: proj(G) = G P^T = V exactly when G = V P.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(d);
  perm.setIdentity();
  std::mt19937_64 rng(seed);
  std::shuffle(perm.indices().data(), perm.indices().data() + d, rng);
  const Mat pm = Mat(perm);
  const Mat g = v * pm;
  LinearMap<double> proj{pm, Vector<double>::Zero(d)};
  LinearMap<double> head{random_gaussian(seed + 1, 1, d), Vector<double>::Constant(1, 0.25)};
  const Vector<double> y = head(v).col(0);
  const double scale = 1.3, bias = -0.4;
  const auto h = hybrid_loss(v, g, proj, head, y, scale, bias);
  const auto s = siglip_loss(v, v, scale, bias);
  return std::abs(h.loss - s.loss);
}

double correlation_identity_gap(std::uint64_t seed, int n, int d, std::size_t n_pairs, bool rotate) {
  const Mat a = random_gaussian(seed, n, d);
  Mat b = a;
  if (rotate) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_gaussian(seed + 1, d, d));
    const Eigen::MatrixXd q = qr.householderQ();
    b = a * q;
  }
  const auto c = pairwise_distance_correlation(a, b, n_pairs, seed);
  return std::max(std::abs(c.spearman - 1.0), std::abs(c.pearson - 1.0));
}

std::vector<CheckResult> run_loss_suite(const GradCheckConfig &cfg) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  for (auto kind : {LossKind::NtXent, LossKind::Siglip, LossKind::Hybrid}) {
    const auto s = check_gradients(kind, cfg);
    add(fmt::format("gradient {}", kind_name(kind)), s.passed(),
        fmt::format("{} cases, {} entries, max rel err {:.3e}, worst: {}", s.cases, s.entries,
                    s.max_rel_error, s.worst));
  }

  {
    Mat eye = Mat::Identity(2, 2);
    const double l = nt_xent(eye, eye, NtXentOptions{1.0, false, true}).loss;
    add("nt_xent hand value (N=2, tau=1)", std::abs(l + 2.0) < 1e-12, fmt::format("loss {:.15g}, expected -2", l));
  }
  {
    Mat v(1, 2), t(1, 2);
    v << 1, 0;
    t << 0, 1;
    const double l = siglip_loss(v, t, 1.0, 0.0).loss;
    add("siglip hand value (N=1, v.t=0)", std::abs(l - std::log(2.0)) < 1e-12,
        fmt::format("loss {:.15g}, expected log 2", l));
  }
  {
    Mat eye = Mat::Identity(2, 2);
    const double l = siglip_loss(eye, eye, 1.0, 0.0).loss;
    const double expect = 0.25 * (2 * detail::softplus(-1.0) + 2 * detail::softplus(0.0));
    add("siglip hand value (N=2, orthogonal)", std::abs(l - expect) < 1e-12,
        fmt::format("loss {:.15g}, expected {:.15g}", l, expect));
  }
  {
    double worst = 0;
    for (std::uint64_t s = 0; s < 20; ++s) worst = std::max(worst, hybrid_identity_gap(s, 6, 8));
    add("hybrid reduces to siglip(V, V)", worst <= 1e-12, fmt::format("max gap {:.3e}", worst));
  }
  {
    const Mat v = random_normalized(7, 6, 4), t = random_normalized(8, 6, 4);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
    perm.setIdentity();
    std::mt19937_64 rng(9);
    std::shuffle(perm.indices().data(), perm.indices().data() + 6, rng);
    const Mat pv = perm * v, pt = perm * t;
    const double gap = std::abs(siglip_loss(v, t, 1.1, 0.3).loss - siglip_loss(pv, pt, 1.1, 0.3).loss);
    add("siglip permutation equivariance", gap < 1e-12, fmt::format("gap {:.3e}", gap));
  }
  {
    double worst = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      worst = std::max(worst, correlation_identity_gap(s, 40, 8, 400, false));
      worst = std::max(worst, correlation_identity_gap(s, 40, 8, 400, true));
    }
    add("correlation identical and rotated embeddings", worst <= 1e-12, fmt::format("max |1 - rho|, |1 - r| {:.3e}", worst));
  }
  return out;
}

}  // namespace molcurr
