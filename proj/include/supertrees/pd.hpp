#pragma once

// Two-parameter Poisson-Dirichlet laws PD(alpha, theta).
//
// The limit point process of a dilute Gibbs partition is written with
// (alpha, beta); it is PD(alpha, -alpha beta). That conversion happens in
// theta_from_beta and nowhere else.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "supertrees/error.hpp"
#include "supertrees/random.hpp"

namespace supertrees::pd {

inline void validate_pd(double alpha, double theta) {
  detail::require(alpha > 0.0 && alpha < 1.0, "PD needs 0 < alpha < 1");
  detail::require(theta > -alpha, "PD needs theta > -alpha");
}

inline double theta_from_beta(double alpha, double beta) { return -alpha * beta; }

/// Ranked masses V_1 > V_2 > ... of one PD sample, truncated; the mass not
/// carried by `points` is kept in `remainder`.
struct RankedWeights {
  std::vector<double> points;
  double remainder = 0.0;
  double alpha = 0.0;
  double theta = 0.0;

  double largest(std::size_t i = 0) const { return i < points.size() ? points[i] : 0.0; }

  double total() const { return std::accumulate(points.begin(), points.end(), 0.0) + remainder; }

  /// sum V_i^p over the stored points (p >= 1). The true value lies in
  /// [power_sum(p), power_sum(p) + remainder^p].
  double power_sum(double p) const {
    double s = 0.0;
    for (double v : points) s += std::pow(v, p);
    return s;
  }
};

namespace impl {

inline void rank(std::vector<double>& points, double& remainder) {
  std::vector<double> kept;
  kept.reserve(points.size());
  for (double v : points) {
    if (v > 0.0) kept.push_back(v);
  }
  // Stable sort keeps stick order among (probability zero) ties.
  std::stable_sort(kept.begin(), kept.end(), std::greater<>());
  points = std::move(kept);
  remainder = std::max(remainder, 0.0);
}

}  // namespace impl

/// Stick-breaking: the i-th stick takes a Beta(1 - alpha, theta + i alpha)
/// fraction of what is left.
template <class Engine>
RankedWeights sample_pd(double alpha, double theta, std::size_t K, Engine& rng) {
  validate_pd(alpha, theta);
  detail::require(K >= 1, "stick count must be at least 1");
  RankedWeights out;
  out.alpha = alpha;
  out.theta = theta;
  out.points.reserve(K);
  double left = 1.0;
  for (std::size_t i = 1; i <= K; ++i) {
    const double w = beta_draw(rng, 1.0 - alpha, theta + static_cast<double>(i) * alpha);
    out.points.push_back(left * w);
    left *= 1.0 - w;
  }
  out.remainder = left;
  impl::rank(out.points, out.remainder);
  return out;
}

/// First (unranked) stick only; its mean is (1 - alpha) / (1 + theta).
template <class Engine>
double sample_first_stick(double alpha, double theta, Engine& rng) {
  validate_pd(alpha, theta);
  return beta_draw(rng, 1.0 - alpha, theta + alpha);
}

/// m-th factorial moment of Poi(c Z) in the dilute regime, which depends on
/// alpha and beta only.
inline double poisson_factorial_moment(double alpha, double beta, int m) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  detail::require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  detail::require(m >= 0, "moment order must be nonnegative");
  if (m == 0) return 1.0;
  using boost::math::lgamma;
  const double log_value = m * (std::log(alpha) - lgamma(1.0 - alpha)) + lgamma(1.0 - alpha * beta) +
                           lgamma(m + 1.0 - beta) - lgamma(1.0 + alpha * (m - beta)) - lgamma(1.0 - beta);
  return std::exp(log_value);
}

/// log of the m-th correlation function of PD(alpha, -alpha beta) at x,
/// m = x.size(). The function itself overflows near the faces of the simplex.
inline double log_correlation_function(double alpha, double beta, std::span<const double> x) {
  detail::require(!x.empty(), "correlation function needs m >= 1 coordinates");
  double total = 0.0;
  for (double xi : x) {
    detail::require(xi > 0.0, "correlation function is defined on the open simplex");
    total += xi;
  }
  detail::require(total < 1.0, "correlation function is defined on the open simplex");
  const int m = static_cast<int>(x.size());
  double value = std::log(poisson_factorial_moment(alpha, beta, m)) + (alpha * (m - beta) - 1.0) * std::log1p(-total);
  for (double xi : x) value -= (alpha + 1.0) * std::log(xi);
  return value;
}

inline double correlation_function(double alpha, double beta, std::span<const double> x) {
  return std::exp(log_correlation_function(alpha, beta, x));
}

/// E[sum V_i^2] = (1 - alpha) / (1 + theta).
inline double pair_probability(double alpha, double theta) {
  validate_pd(alpha, theta);
  return (1.0 - alpha) / (1.0 + theta);
}

/// Products X_i Y_{i,j} with X ~ PD(a1 a2, -a1 a2 a3) and independent
/// Y_i ~ PD(a1, -a1 a2), ranked and cut to the K largest. Each factor uses K
/// sticks; all mass not in the kept products goes to the remainder.
template <class Engine>
RankedWeights combine_products(double a1, double a2, double a3, std::size_t K, Engine& rng) {
  for (double a : {a1, a2, a3}) detail::require(a > 0.0 && a < 1.0, "lemma parameters must lie in (0, 1)");
  detail::require(a1 * a2 < 1.0 && a2 * a3 < 1.0, "lemma products must lie in (0, 1)");
  const double outer_alpha = a1 * a2;
  const RankedWeights X = sample_pd(outer_alpha, theta_from_beta(outer_alpha, a3), K, rng);
  std::vector<double> products;
  products.reserve(X.points.size() * K);
  for (double xi : X.points) {
    const RankedWeights Y = sample_pd(a1, theta_from_beta(a1, a2), K, rng);
    for (double y : Y.points) products.push_back(xi * y);
  }
  std::stable_sort(products.begin(), products.end(), std::greater<>());
  if (products.size() > K) products.resize(K);
  RankedWeights out;
  out.alpha = a1;
  out.theta = theta_from_beta(a1, a2 * a3);
  out.points = std::move(products);
  out.remainder = 1.0 - std::accumulate(out.points.begin(), out.points.end(), 0.0);
  impl::rank(out.points, out.remainder);
  return out;
}

inline void write_ranked_csv(std::ostream& out, const RankedWeights& w) {
  out << "rank,weight,cumulative\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    cumulative += w.points[i];
    out << i + 1 << ',' << w.points[i] << ',' << cumulative << '\n';
  }
}

}  // namespace supertrees::pd
