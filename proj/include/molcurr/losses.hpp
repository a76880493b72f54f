#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace molcurr {

template <class Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class ShapeMismatch : public std::invalid_argument {
 public:
  explicit ShapeMismatch(const std::string &what) : std::invalid_argument("ShapeMismatch: " + what) {}
};

class NotNormalized : public std::invalid_argument {
 public:
  explicit NotNormalized(const std::string &what) : std::invalid_argument("NotNormalized: " + what) {}
};

template <class Derived>
Embedding<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived> &m) {
  Embedding<typename Derived::Scalar> out = m;
  out.rowwise().normalize();
  return out;
}

template <class Derived>
bool is_row_normalized(const Eigen::MatrixBase<Derived> &m, double tol = 1e-9) {
  using std::abs;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (abs(static_cast<double>(m.row(i).norm()) - 1.0) > tol) return false;
  return true;
}

namespace detail {

template <class Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return (x > Scalar(0) ? x : Scalar(0)) + log1p(exp(-(x < Scalar(0) ? -x : x)));
}

template <class Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template <class A, class B>
void require_same_shape(const A &a, const B &b, const char *what) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() < 1 || a.cols() < 1)
    throw ShapeMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
}

template <class A>
void require_normalized(bool check, const A &a, const char *what) {
  if (check && !is_row_normalized(a)) throw NotNormalized(what);
}

}  // namespace detail

// ---- NT-Xent ---------------------------------------------------------------

struct NtXentOptions {
  double tau = 0.07;
  // false: denominator over k != i (positive excluded); true: over all k.
  bool canonical_denominator = false;
  bool check_normalized = false;
};

template <class Scalar>
struct NtXentResult {
  Scalar loss;
  Embedding<Scalar> grad_v1;
  Embedding<Scalar> grad_v2;
};

// L = -sum_i log( exp(s_ii / tau) / sum_{k in D_i} exp(s_ik / tau) ), s = V1 V2^T.
template <class D1, class D2>
NtXentResult<typename D1::Scalar> nt_xent(const Eigen::MatrixBase<D1> &v1,
                                          const Eigen::MatrixBase<D2> &v2,
                                          const NtXentOptions &opt = {}) {
  using Scalar = typename D1::Scalar;
  detail::require_same_shape(v1, v2, "nt_xent");
  if (v1.rows() < 2) throw ShapeMismatch("nt_xent needs N >= 2");
  if (!(opt.tau > 0)) throw std::invalid_argument("nt_xent: tau must be positive");
  detail::require_normalized(opt.check_normalized, v1, "nt_xent V1");
  detail::require_normalized(opt.check_normalized, v2, "nt_xent V2");

  const Eigen::Index n = v1.rows();
  const Scalar inv_tau = Scalar(1) / Scalar(opt.tau);
  Embedding<Scalar> logits = (v1 * v2.transpose()) * inv_tau;
  Embedding<Scalar> g = Embedding<Scalar>::Zero(n, n);  // dL / d logits
  Scalar loss(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar mx = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index k = 0; k < n; ++k)
      if (opt.canonical_denominator || k != i) mx = std::max(mx, logits(i, k));
    Scalar z(0);
    for (Eigen::Index k = 0; k < n; ++k)
      if (opt.canonical_denominator || k != i) z += std::exp(logits(i, k) - mx);
    const Scalar lse = mx + std::log(z);
    loss += lse - logits(i, i);
    for (Eigen::Index k = 0; k < n; ++k)
      if (opt.canonical_denominator || k != i) g(i, k) = std::exp(logits(i, k) - lse);
    g(i, i) -= Scalar(1);
  }
  g *= inv_tau;
  return {loss, g * v2, g.transpose() * v1};
}

// ---- SigLIP ----------------------------------------------------------------

struct SiglipOptions {
  // true: l_ij * b inside the sigmoid; false: + b unsigned.
  bool signed_bias = true;
  bool check_normalized = false;
};

template <class Scalar>
struct SiglipResult {
  Scalar loss;
  Embedding<Scalar> grad_v;
  Embedding<Scalar> grad_t;
  Scalar grad_scale;
  Scalar grad_bias;
};

// L = -(1/N^2) sum_ij log sigmoid(l_ij * s * v_i.t_j + l_ij * b), l_ij = +1 iff i == j.
template <class D1, class D2>
SiglipResult<typename D1::Scalar> siglip_loss(const Eigen::MatrixBase<D1> &v,
                                              const Eigen::MatrixBase<D2> &t,
                                              typename D1::Scalar scale, typename D1::Scalar bias,
                                              const SiglipOptions &opt = {}) {
  using Scalar = typename D1::Scalar;
  detail::require_same_shape(v, t, "siglip_loss");
  detail::require_normalized(opt.check_normalized, v, "siglip_loss V");
  detail::require_normalized(opt.check_normalized, t, "siglip_loss T");

  const Eigen::Index n = v.rows();
  const Scalar inv_n2 = Scalar(1) / Scalar(n * n);
  const Embedding<Scalar> sim = v * t.transpose();
  Embedding<Scalar> g(n, n);  // dL / d sim
  Scalar loss(0), grad_scale(0), grad_bias(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar l = i == j ? Scalar(1) : Scalar(-1);
      const Scalar z = l * scale * sim(i, j) + (opt.signed_bias ? l * bias : bias);
      loss += detail::softplus(-z);
      const Scalar dz = -detail::sigmoid(-z) * inv_n2;
      g(i, j) = dz * l * scale;
      grad_scale += dz * l * sim(i, j);
      grad_bias += opt.signed_bias ? dz * l : dz;
    }
  }
  return {loss * inv_n2, g * t, g.transpose() * v, grad_scale, grad_bias};
}

// ---- Hybrid distillation ---------------------------------------------------

// y = x W^T + bias; W is (out x in).
template <class Scalar>
struct LinearMap {
  Embedding<Scalar> weight;
  Vector<Scalar> bias;

  template <class D>
  Embedding<Scalar> operator()(const Eigen::MatrixBase<D> &x) const {
    Embedding<Scalar> y = x * weight.transpose();
    y.rowwise() += bias.transpose();
    return y;
  }
};

struct HybridOptions {
  double alpha = 10.0;
  double beta = 1.0;
  SiglipOptions siglip;
};

template <class Scalar>
struct HybridResult {
  Scalar loss;
  Scalar siglip_term;
  Scalar align_term;
  Scalar head_term;
  Embedding<Scalar> grad_v;
  LinearMap<Scalar> grad_proj;
  LinearMap<Scalar> grad_head;
  Scalar grad_scale;
  Scalar grad_bias;
};

// L = siglip(V, normalize(proj(G))) + alpha sum ||proj(g_i) - v_i||^2
//     + beta sum ||head(v_i) - y_i||^2
template <class DV, class DG, class DY>
HybridResult<typename DV::Scalar> hybrid_loss(const Eigen::MatrixBase<DV> &v,
                                              const Eigen::MatrixBase<DG> &g,
                                              const LinearMap<typename DV::Scalar> &proj,
                                              const LinearMap<typename DV::Scalar> &head,
                                              const Eigen::MatrixBase<DY> &y,
                                              typename DV::Scalar scale, typename DV::Scalar bias,
                                              const HybridOptions &opt = {}) {
  using Scalar = typename DV::Scalar;
  const Eigen::Index n = v.rows(), d = v.cols();
  if (g.rows() != n || y.rows() != n || y.cols() != 1)
    throw ShapeMismatch("hybrid_loss: V, G and y need the same number of rows");
  if (proj.weight.rows() != d || proj.weight.cols() != g.cols() || proj.bias.size() != d)
    throw ShapeMismatch("hybrid_loss: projection must map d_g -> d");
  if (head.weight.rows() != 1 || head.weight.cols() != d || head.bias.size() != 1)
    throw ShapeMismatch("hybrid_loss: head must map d -> 1");
  if (opt.alpha < 0 || opt.beta < 0) throw std::invalid_argument("hybrid_loss: alpha, beta >= 0");
  detail::require_normalized(opt.siglip.check_normalized, v, "hybrid_loss V");

  const Scalar alpha(opt.alpha), beta(opt.beta);
  const Embedding<Scalar> p = proj(g);
  const Vector<Scalar> norms = p.rowwise().norm();
  const Embedding<Scalar> t = norms.cwiseInverse().asDiagonal() * p;
  auto sl = siglip_loss(v, t, scale, bias, SiglipOptions{opt.siglip.signed_bias, false});

  const Embedding<Scalar> diff = p - v;
  const Vector<Scalar> resid = head(v).col(0) - y.col(0);

  HybridResult<Scalar> r;
  r.siglip_term = sl.loss;
  r.align_term = alpha * diff.squaredNorm();
  r.head_term = beta * resid.squaredNorm();
  r.loss = r.siglip_term + r.align_term + r.head_term;
  r.grad_scale = sl.grad_scale;
  r.grad_bias = sl.grad_bias;

  // Backprop through row normalization: dp = (dt - t (t . dt)) / ||p||.
  const Vector<Scalar> tdot = (t.cwiseProduct(sl.grad_t)).rowwise().sum();
  Embedding<Scalar> grad_p =
      norms.cwiseInverse().asDiagonal() * (sl.grad_t - tdot.asDiagonal() * t);
  grad_p += Scalar(2) * alpha * diff;

  r.grad_proj.weight = grad_p.transpose() * g;
  r.grad_proj.bias = grad_p.colwise().sum().transpose();
  r.grad_v = sl.grad_v - Scalar(2) * alpha * diff +
             (Scalar(2) * beta * resid) * head.weight.row(0);
  r.grad_head.weight = (Scalar(2) * beta * resid.transpose() * v);
  r.grad_head.bias = Vector<Scalar>::Constant(1, Scalar(2) * beta * resid.sum());
  return r;
}

}  // namespace molcurr
