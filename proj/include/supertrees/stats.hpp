#pragma once

// Two-sample statistics and goodness-of-fit helpers.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "supertrees/error.hpp"

namespace supertrees::stats {

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

/// Wasserstein-1 distance between the two empirical laws.
inline double wasserstein1(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "W1 needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Integral of |F_a - F_b| over the merged breakpoints.
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a[0], b[0]);
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
    else x = b[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (x - prev);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    prev = x;
  }
  return total;
}

/// Asymptotic critical value of the two-sample KS statistic at `level`.
inline double ks_critical_value(std::size_t n, std::size_t m, double level = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

/// Asymptotic p-value of a two-sample KS statistic (Kolmogorov series).
inline double ks_p_value(double d, std::size_t n, std::size_t m) {
  const double en = std::sqrt(static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of observed counts against probabilities.
inline ChiSquare chi_square(const std::vector<double>& observed, const std::vector<double>& expected_prob) {
  detail::require(observed.size() == expected_prob.size() && observed.size() >= 2, "chi-square needs matching cells");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquare r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * expected_prob[i];
    detail::require(e > 0.0, "chi-square cells need positive expectation");
    r.statistic += (observed[i] - e) * (observed[i] - e) / e;
  }
  r.dof = static_cast<int>(observed.size()) - 1;
  r.p_value = boost::math::gamma_q(r.dof / 2.0, r.statistic / 2.0);
  return r;
}

using Counts = std::map<std::string, double>;

/// Total variation distance between two empirical laws given as counts.
inline double total_variation(const Counts& a, const Counts& b) {
  double na = 0.0, nb = 0.0;
  for (const auto& [k, c] : a) na += c;
  for (const auto& [k, c] : b) nb += c;
  detail::require(na > 0.0 && nb > 0.0, "TV needs nonempty samples");
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += ia->second / na;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += ib->second / nb;
      ++ib;
    } else {
      sum += std::abs(ia->second / na - ib->second / nb);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

/// TV distance between the empirical joint law of pairs and the product
/// of its own marginals.
inline double independence_tv(const std::vector<std::pair<std::string, std::string>>& pairs) {
  detail::require(!pairs.empty(), "independence TV needs samples");
  Counts left, right;
  std::map<std::pair<std::string, std::string>, double> joint;
  for (const auto& p : pairs) {
    left[p.first] += 1.0;
    right[p.second] += 1.0;
    joint[p] += 1.0;
  }
  const double n = static_cast<double>(pairs.size());
  double sum = 0.0, covered = 0.0;
  for (const auto& [key, c] : joint) {
    const double prod = left[key.first] / n * (right[key.second] / n);
    sum += std::abs(c / n - prod);
    covered += prod;
  }
  sum += 1.0 - covered;  // product mass on pairs never observed jointly
  return 0.5 * sum;
}

inline double mean(const std::vector<double>& x) {
  detail::require(!x.empty(), "mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Standard error of the mean.
inline double standard_error(const std::vector<double>& x) {
  detail::require(x.size() >= 2, "standard error needs two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

inline double median(std::vector<double> x) {
  detail::require(!x.empty(), "median of an empty sample");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  const double hi = x[mid];
  if (x.size() % 2 == 1) return hi;
  const double lo = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace supertrees::stats
