#pragma once

// Exact generating-series engine.
//
// Coefficients are GMP rationals; ordinary counting series hold integers
// (denominator 1). Nothing here touches floating point.

#include <gmpxx.h>

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "supertrees/bignum.hpp"
#include "supertrees/error.hpp"

namespace supertrees::series {

enum class SeriesKind { ordinary, exponential };

/// Truncated power series sum_{n<=N} c_n x^n with exact nonnegative rational
/// coefficients. Immutable once built.
class CoeffSeries {
 public:
  CoeffSeries() = default;

  CoeffSeries(std::vector<mpq_class> coeffs, SeriesKind kind, std::string label)
      : coeffs_(std::move(coeffs)), kind_(kind), label_(std::move(label)) {
    detail::require(!coeffs_.empty(), "series needs at least the constant coefficient");
    for (auto& c : coeffs_) {
      c.canonicalize();
      detail::require(sgn(c) >= 0, "series coefficients must be nonnegative");
    }
  }

  static CoeffSeries from_integers(const std::vector<mpz_class>& values, SeriesKind kind,
                                   std::string label) {
    std::vector<mpq_class> q(values.begin(), values.end());
    return CoeffSeries(std::move(q), kind, std::move(label));
  }

  std::size_t order() const { return coeffs_.size() - 1; }
  const mpq_class& operator[](std::size_t n) const { return coeffs_.at(n); }
  std::span<const mpq_class> coeffs() const { return coeffs_; }
  SeriesKind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  bool is_integral() const {
    for (const auto& c : coeffs_)
      if (c.get_den() != 1) return false;
    return true;
  }

  /// Coefficient n as an integer; throws if it is not one.
  mpz_class integer_at(std::size_t n) const {
    const auto& c = coeffs_.at(n);
    detail::require(c.get_den() == 1, "coefficient is not an integer");
    return c.get_num();
  }

  /// Number of structures of size n: the coefficient itself for ordinary
  /// series, n! times it for exponential ones.
  mpq_class count(std::size_t n) const {
    if (kind_ == SeriesKind::ordinary) return coeffs_.at(n);
    mpq_class out(factorial(static_cast<unsigned long>(n)) * coeffs_.at(n));
    out.canonicalize();
    return out;
  }

  /// The series truncated to order N (N <= order()).
  CoeffSeries truncated(std::size_t N) const {
    detail::require(N <= order(), "cannot truncate beyond the computed order");
    return CoeffSeries({coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(N + 1)},
                       kind_, label_);
  }

 private:
  std::vector<mpq_class> coeffs_{mpq_class(0)};
  SeriesKind kind_ = SeriesKind::ordinary;
  std::string label_;
};

namespace impl {

// (a*b) mod x^(N+1), where a vanishes below index a_lo and b below b_lo.
inline std::vector<mpz_class> truncated_product(const std::vector<mpz_class>& a, std::size_t a_lo,
                                                const std::vector<mpz_class>& b, std::size_t b_lo,
                                                std::size_t N) {
  std::vector<mpz_class> out(N + 1);
  for (std::size_t m = a_lo + b_lo; m <= N; ++m) {
    mpz_class& acc = out[m];
    for (std::size_t i = a_lo; i + b_lo <= m; ++i) {
      if (sgn(a[i]) == 0) continue;
      const auto& bj = b[m - i];
      if (sgn(bj) == 0) continue;
      mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), bj.get_mpz_t());
    }
  }
  return out;
}

inline std::size_t lowest_nonzero(std::span<const mpz_class> v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) return i;
  return v.size();
}

// sum_{i=1}^{k-1} f_i f_{k-i} using the symmetry of the summand.
inline mpz_class self_convolution(const std::vector<mpz_class>& f, std::size_t k) {
  mpz_class acc = 0;
  for (std::size_t i = 1; 2 * i < k; ++i) mpz_addmul(acc.get_mpz_t(), f[i].get_mpz_t(), f[k - i].get_mpz_t());
  acc *= 2;
  if (k % 2 == 0 && k >= 2) mpz_addmul(acc.get_mpz_t(), f[k / 2].get_mpz_t(), f[k / 2].get_mpz_t());
  return acc;
}

}  // namespace impl

/// U = V(W) mod x^(N+1) by accumulating the powers W, W^2, ....
/// W must have zero constant term. The result carries W's kind: the outer
/// weights v_k are always exponential-type weights on the number of blocks.
inline CoeffSeries compose_series(const CoeffSeries& V, const CoeffSeries& W, std::size_t N,
                                  std::string label = {}) {
  detail::require(sgn(W[0]) == 0, "composition needs an inner series with zero constant term");
  detail::require(W.order() >= N, "inner series is not computed to the requested order");
  std::vector<mpq_class> out(N + 1);
  out[0] = sgn(V[0]) != 0 ? V[0] : mpq_class(0);

  const CoeffSeries w_trunc = W.truncated(N);
  const auto w_coeffs = w_trunc.coeffs();
  const mpz_class den = lcm_of_denominators(w_coeffs);
  const std::vector<mpz_class> w_num = over_common_denominator(w_coeffs, den);
  const std::size_t w_lo = impl::lowest_nonzero(w_num);
  if (w_lo > N) return CoeffSeries(std::move(out), W.kind(), std::move(label));

  const bool integral = den == 1 && V.is_integral();
  std::vector<mpz_class> acc_int(N + 1);

  std::vector<mpz_class> power = w_num;  // numerators of W^k over den^k
  std::size_t power_lo = w_lo;
  mpz_class den_power = den;
  const std::size_t k_max = std::min(N / w_lo, V.order());
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (k > 1) {
      power = impl::truncated_product(power, power_lo, w_num, w_lo, N);
      power_lo += w_lo;
      den_power *= den;
    }
    const mpq_class& vk = V[k];
    if (sgn(vk) == 0) continue;
    if (integral) {
      const mpz_class& vz = vk.get_num();
      for (std::size_t m = power_lo; m <= N; ++m)
        if (sgn(power[m]) != 0) mpz_addmul(acc_int[m].get_mpz_t(), vz.get_mpz_t(), power[m].get_mpz_t());
    } else {
      const mpq_class scale = vk / mpq_class(den_power);
      for (std::size_t m = power_lo; m <= N; ++m)
        if (sgn(power[m]) != 0) out[m] += scale * mpq_class(power[m]);
    }
  }
  if (integral)
    for (std::size_t m = 1; m <= N; ++m) out[m] = mpq_class(acc_int[m]);
  return CoeffSeries(std::move(out), W.kind(), std::move(label));
}

/// factor * x * S(x), truncated to the order of S.
inline CoeffSeries shifted(const CoeffSeries& S, const mpq_class& factor, std::string label = {}) {
  std::vector<mpq_class> out(S.order() + 1);
  for (std::size_t n = 1; n <= S.order(); ++n) out[n] = factor * S[n - 1];
  return CoeffSeries(std::move(out), S.kind(), std::move(label));
}

/// Catalan numbers f_{1,n} = binom(2n,n)/(n+1): binary trees where every
/// vertex has an optional left and an optional right child.
inline CoeffSeries f1_series(std::size_t N) {
  detail::require(N >= 1, "f1_series needs N >= 1");
  std::vector<mpz_class> c(N + 1);
  for (std::size_t n = 1; n <= N; ++n)
    c[n] = binomial(2 * static_cast<unsigned long>(n), static_cast<unsigned long>(n)) / (n + 1);
  return CoeffSeries::from_integers(c, SeriesKind::ordinary, "F1");
}

/// Counts for one level of Kemp's recursion: `count` holds f_{d,m} and
/// `pair` holds [x^m](1 + F_d)^2, the weight of the child configurations
/// hanging below a root.
struct KempLevel {
  std::vector<mpz_class> count;
  std::vector<mpz_class> pair;
};

/// Solves F_d = x F_{d-1} (1 + F_d)^2 coefficientwise, with F_0 = 1.
inline KempLevel kemp_next_level(const std::vector<mpz_class>& previous, std::size_t N) {
  KempLevel level;
  auto& f = level.count;
  auto& h = level.pair;
  f.assign(N + 1, 0);
  h.assign(N + 1, 0);
  h[0] = 1;
  for (std::size_t n = 1; n <= N; ++n) {
    mpz_class acc = 0;
    for (std::size_t m = 0; m + 1 <= n; ++m) {
      if (sgn(previous[m]) == 0) continue;
      mpz_addmul(acc.get_mpz_t(), previous[m].get_mpz_t(), h[n - 1 - m].get_mpz_t());
    }
    f[n] = std::move(acc);
    h[n] = 2 * f[n] + impl::self_convolution(f, n);
  }
  return level;
}

/// Levels F_1..F_d up to order N; index 0 of the result is F_1.
inline std::vector<KempLevel> kemp_levels(int d, std::size_t N) {
  detail::require(d >= 1, "dimension must be at least 1");
  detail::require(N >= 1, "order must be at least 1");
  std::vector<KempLevel> levels;
  std::vector<mpz_class> prev(N + 1, 0);
  prev[0] = 1;
  for (int j = 1; j <= d; ++j) {
    levels.push_back(kemp_next_level(prev, N));
    prev = levels.back().count;
  }
  return levels;
}

/// Kemp's d-dimensional binary trees, F_d(x) = F_1(x F_{d-1}(x)).
///
/// Computed from the root decomposition F_d = x F_{d-1} (1 + F_d)^2, which
/// is the same series as the composition but costs O(N^2) per level instead
/// of O(N^3); the two routes are checked against each other in the tests.
inline CoeffSeries kemp_series(int d, std::size_t N) {
  auto levels = kemp_levels(d, N);
  return CoeffSeries::from_integers(levels.back().count, SeriesKind::ordinary,
                                    "F" + std::to_string(d));
}

/// Rooted unordered labelled trees: T_1(z) = sum n^(n-1)/n! z^n.
inline CoeffSeries cayley_series(std::size_t N) {
  std::vector<mpq_class> c(N + 1);
  for (std::size_t n = 1; n <= N; ++n) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), n, n - 1);
    c[n] = mpq_class(p, factorial(static_cast<unsigned long>(n)));
  }
  return CoeffSeries(std::move(c), SeriesKind::exponential, "T1");
}

/// Iterated labelled supertrees T_d(z) = T_1(z T_{d-1}(z)), as an
/// exponential series.
inline CoeffSeries labelled_iterated_series(int d, std::size_t N) {
  detail::require(d >= 1, "dimension must be at least 1");
  detail::require(N >= 1, "order must be at least 1");
  const CoeffSeries t1 = cayley_series(N);
  CoeffSeries current = t1;
  for (int j = 2; j <= d; ++j) {
    current = compose_series(t1, shifted(current, 1), N, "T" + std::to_string(j));
  }
  return current;
}

/// Polya trees: the fixed point of A(z) = z exp(sum_{i>=1} A(z^i)/i).
///
/// The fixed point is extracted coefficientwise with the Euler-transform
/// recurrence n a_{n+1} = sum_{k=1}^{n} (sum_{d|k} d a_d) a_{n-k+1}, which is
/// exact in integers.
inline CoeffSeries polya_series(std::size_t N) {
  detail::require(N >= 1, "polya_series needs N >= 1");
  std::vector<mpz_class> a(N + 1, 0), s(N + 1, 0);
  a[1] = 1;
  for (std::size_t n = 1; n < N; ++n) {
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) s[n] += d * a[d];
    mpz_class acc = 0;
    for (std::size_t k = 1; k <= n; ++k) mpz_addmul(acc.get_mpz_t(), s[k].get_mpz_t(), a[n - k + 1].get_mpz_t());
    a[n + 1] = acc / n;
  }
  return CoeffSeries::from_integers(a, SeriesKind::ordinary, "A");
}

/// Plane trees, G(z) = z / (1 - G(z)), i.e. G = z + G^2.
inline CoeffSeries plane_series(std::size_t N) {
  detail::require(N >= 1, "plane_series needs N >= 1");
  std::vector<mpz_class> g(N + 1, 0);
  g[1] = 1;
  for (std::size_t n = 2; n <= N; ++n) g[n] = impl::self_convolution(g, n);
  return CoeffSeries::from_integers(g, SeriesKind::ordinary, "G");
}

/// Planar supertrees K(z) = G(z G(z)); with `oriented_attachments` every
/// attachment edge is additionally declared left or right, giving
/// K~(z) = G(2 z G(z)).
inline CoeffSeries planar_supertree_series(std::size_t N, bool oriented_attachments) {
  const CoeffSeries g = plane_series(N);
  const mpq_class factor = oriented_attachments ? 2 : 1;
  return compose_series(g, shifted(g, factor), N, oriented_attachments ? "Ktilde" : "K");
}

/// CSV with columns n, numerator, denominator, count. `count` is the number
/// of structures: the coefficient for ordinary series, n! times it for
/// exponential ones.
inline void write_series_csv(std::ostream& out, const CoeffSeries& s) {
  out << "n,numerator,denominator,count\n";
  for (std::size_t n = 0; n <= s.order(); ++n) {
    const mpq_class& c = s[n];
    const mpq_class count = s.count(n);
    out << n << ',' << c.get_num().get_str() << ',' << c.get_den().get_str() << ',' << count.get_str()
        << '\n';
  }
}

}  // namespace supertrees::series
