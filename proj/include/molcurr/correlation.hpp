#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "molcurr/losses.hpp"

namespace molcurr {

class DegenerateVariance : public std::domain_error {
 public:
  DegenerateVariance() : std::domain_error("DegenerateVariance: all distances are equal") {}
};

// 1-based ranks; tied values share the mean of their positions.
template <class Scalar>
Vector<Scalar> rank_average(const Vector<Scalar> &x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a) < x(b); });
  Vector<Scalar> ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[j + 1]) == x(order[i])) ++j;
    const Scalar r = Scalar(i + j) / Scalar(2) + Scalar(1);
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[k]) = r;
    i = j + 1;
  }
  return ranks;
}

template <class Scalar>
Scalar pearson(const Vector<Scalar> &x, const Vector<Scalar> &y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeMismatch("pearson needs equal lengths >= 2");
  const Vector<Scalar> xc = x.array() - x.mean();
  const Vector<Scalar> yc = y.array() - y.mean();
  const Scalar sxx = xc.squaredNorm(), syy = yc.squaredNorm();
  if (sxx == Scalar(0) || syy == Scalar(0)) throw DegenerateVariance();
  return xc.dot(yc) / std::sqrt(sxx * syy);
}

template <class Scalar>
Scalar spearman(const Vector<Scalar> &x, const Vector<Scalar> &y) {
  return pearson<Scalar>(rank_average(x), rank_average(y));
}

using IndexPair = std::pair<Eigen::Index, Eigen::Index>;

// n_pairs index pairs (i != j) drawn uniformly with mt19937_64(seed).
inline std::vector<IndexPair> sample_pairs(Eigen::Index n, std::size_t n_pairs, std::uint64_t seed) {
  if (n < 2) throw ShapeMismatch("sample_pairs needs at least 2 rows");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1), second(0, n - 2);
  std::vector<IndexPair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Eigen::Index i = first(rng);
    Eigen::Index j = second(rng);
    if (j >= i) ++j;
    pairs.emplace_back(i, j);
  }
  return pairs;
}

// Every unordered pair i < j.
inline std::vector<IndexPair> all_pairs(Eigen::Index n) {
  std::vector<IndexPair> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

template <class Scalar>
struct DistanceCorrelation {
  Scalar spearman;
  Scalar pearson;
};

template <class DA, class DB>
DistanceCorrelation<typename DA::Scalar> distance_correlation(const Eigen::MatrixBase<DA> &a,
                                                              const Eigen::MatrixBase<DB> &b,
                                                              const std::vector<IndexPair> &pairs) {
  using Scalar = typename DA::Scalar;
  if (a.rows() != b.rows()) throw ShapeMismatch("distance correlation needs equal N");
  if (pairs.size() < 2) throw ShapeMismatch("distance correlation needs at least 2 pairs");
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Vector<Scalar> da(m), db(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    da(k) = (a.row(i) - a.row(j)).norm();
    db(k) = (b.row(i) - b.row(j)).norm();
  }
  return {spearman<Scalar>(da, db), pearson<Scalar>(da, db)};
}

template <class DA, class DB>
DistanceCorrelation<typename DA::Scalar> pairwise_distance_correlation(
    const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b, std::size_t n_pairs,
    std::uint64_t seed) {
  if (n_pairs < 2) throw ShapeMismatch("n_pairs must be >= 2");
  return distance_correlation(a, b, sample_pairs(a.rows(), n_pairs, seed));
}

}  // namespace molcurr
