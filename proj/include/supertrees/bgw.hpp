#pragma once

// Bienayme-Galton-Watson trees conditioned on their size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "supertrees/error.hpp"
#include "supertrees/random.hpp"
#include "supertrees/tree.hpp"

namespace supertrees::trees {

/// A critical offspring law on {0, ..., size()-1}.
class OffspringLaw {
 public:
  OffspringLaw() = default;

  explicit OffspringLaw(std::vector<double> p) : p_(std::move(p)) {
    detail::require(!p_.empty(), "offspring law needs at least one weight");
    long double total = 0.0L, mean = 0.0L;
    for (std::size_t k = 0; k < p_.size(); ++k) {
      detail::require(p_[k] >= 0.0, "offspring weights must be nonnegative");
      total += p_[k];
      mean += static_cast<long double>(k) * p_[k];
    }
    detail::require(std::abs(static_cast<double>(total) - 1.0) < 1e-12, "offspring weights must sum to 1");
    detail::require(std::abs(static_cast<double>(mean) - 1.0) < 1e-12, "offspring law must have mean 1");
    detail::require(p_[0] > 0.0, "offspring law needs p_0 > 0");
    span_ = 0;
    for (std::size_t k = 1; k < p_.size(); ++k)
      if (p_[k] > 0.0) span_ = std::gcd(span_, k);
    p_max_ = *std::max_element(p_.begin(), p_.end());
    // Small values come from a compact table; the last cell of that table
    // stands for the whole tail, which has its own table.
    const std::size_t head = std::min<std::size_t>(p_.size(), kHeadSize);
    std::vector<double> top(p_.begin(), p_.begin() + static_cast<std::ptrdiff_t>(head));
    if (head < p_.size()) {
      top.push_back(std::accumulate(p_.begin() + static_cast<std::ptrdiff_t>(head), p_.end(), 0.0));
      tail_ = AliasTable(std::span<const double>(p_).subspan(head));
    }
    head_ = AliasTable(top);
  }

  /// Geometric law p_k = 2^-(k+1) cut where the weights drop below 2^-64,
  /// with the leftover put back so that mass and mean are exactly 1.
  static OffspringLaw geometric() {
    std::vector<double> p(64);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::ldexp(1.0, -static_cast<int>(k) - 1);
    return normalized(std::move(p));
  }

  /// p_k proportional to k^(-a-1) for 1 <= k <= k_max; p_0 takes the rest so
  /// that the mean is 1. The tail constant is c = p_k k^(a+1).
  static OffspringLaw power_law(double a, std::size_t k_max = 1'000'000) {
    detail::require(a > 1.0 && a < 2.0, "power-law offspring needs 1 < a < 2");
    long double s1 = 0.0L;
    for (std::size_t k = k_max; k >= 1; --k) s1 += std::pow(static_cast<long double>(k), -a);
    const long double c = 1.0L / s1;
    std::vector<double> p(k_max + 1, 0.0);
    long double mass = 0.0L;
    for (std::size_t k = k_max; k >= 1; --k) {
      p[k] = static_cast<double>(c * std::pow(static_cast<long double>(k), -a - 1.0L));
      mass += p[k];
    }
    p[0] = static_cast<double>(1.0L - mass);
    OffspringLaw law(std::move(p));
    law.tail_constant_ = static_cast<double>(c);
    return law;
  }

  double probability(std::size_t k) const { return k < p_.size() ? p_[k] : 0.0; }
  std::size_t support_size() const { return p_.size(); }
  std::size_t span() const { return span_; }
  double tail_constant() const { return tail_constant_; }

  double variance() const {
    long double v = 0.0L;
    for (std::size_t k = 0; k < p_.size(); ++k) v += static_cast<long double>(k) * k * p_[k];
    return static_cast<double>(v - 1.0L);
  }

  /// Sizes n for which a tree exists.
  bool admissible(std::size_t n) const {
    if (n == 0) return false;
    if (n == 1) return true;
    return span_ != 0 && (n - 1) % span_ == 0;
  }

  template <class Engine>
  std::size_t draw(Engine& rng) const {
    const std::size_t k = head_(rng);
    return k < kHeadSize ? k : kHeadSize + tail_(rng);
  }
  double max_probability() const { return p_max_; }

 private:
  static OffspringLaw normalized(std::vector<double> p) {
    // Adjust p_0 and p_2 so that the total and the mean are exactly 1.
    long double total = 0.0L, mean = 0.0L;
    for (std::size_t k = 0; k < p.size(); ++k) {
      total += p[k];
      mean += static_cast<long double>(k) * p[k];
    }
    const long double dm = 1.0L - mean;
    p[2] += static_cast<double>(dm / 2.0L);
    p[0] += static_cast<double>(1.0L - total - dm / 2.0L);
    return OffspringLaw(std::move(p));
  }

  std::vector<double> p_;
  std::size_t span_ = 0;
  double p_max_ = 0.0;
  double tail_constant_ = 0.0;
  static constexpr std::size_t kHeadSize = 1024;
  AliasTable head_;
  AliasTable tail_;
};

/// BGW tree conditioned to have n vertices, as a plane tree. Draws n
/// offspring numbers conditioned to sum to n-1 (the last one by an
/// acceptance step), then rotates them into a Lukasiewicz path with the
/// cycle lemma.
template <class Engine>
SuperTree sample_conditioned_bgw(const OffspringLaw& law, std::size_t n, Engine& rng) {
  if (!law.admissible(n)) {
    std::ostringstream msg;
    msg << "no tree with " << n << " vertices for an offspring law with span " << law.span();
    throw precondition_error(msg.str());
  }
  std::vector<std::size_t> xi(n, 0);
  const std::size_t target = n - 1;
  for (;;) {
    std::size_t sum = 0;
    bool overshoot = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      xi[i] = law.draw(rng);
      sum += xi[i];
      if (sum > target) {
        overshoot = true;
        break;
      }
    }
    if (overshoot) continue;
    const std::size_t last = target - sum;
    xi[n - 1] = last;
    if (uniform01(rng) * law.max_probability() < law.probability(last)) break;
  }

  // Cycle lemma: start right after the first minimum of the walk.
  long long s = 0, best = 1;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    s += static_cast<long long>(xi[k - 1]) - 1;
    if (s < best) {
      best = s;
      start = k % n;
    }
  }

  SuperTree tree(Family::plane, 1);
  tree.reserve(n);
  struct Open {
    int node;
    std::size_t remaining;
  };
  std::vector<Open> stack;
  if (xi[start] > 0) stack.push_back({0, xi[start]});
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t x = xi[(start + i) % n];
    Open& top = stack.back();
    const int v = tree.add_child(top.node, Slot::child);
    if (--top.remaining == 0) stack.pop_back();
    if (x > 0) stack.push_back({v, x});
  }
  return tree;
}

}  // namespace supertrees::trees
