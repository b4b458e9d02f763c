#pragma once

// Gibbs partitions with weight sequences (v, w): partition functions,
// component-count laws, exact samplers and the dilute-regime limit density.
//
// Ordinary generating series throughout: U(x) = V(W(x)) with
// V(x) = sum_{k>=1} v_k x^k and W(x) = sum_{m>=0} w_m x^m, and
// P(N_n = k) = v_k [x^n] W(x)^k / u_n.

#include <gmpxx.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <vector>

#include "supertrees/bignum.hpp"
#include "supertrees/error.hpp"
#include "supertrees/random.hpp"
#include "supertrees/series.hpp"
#include "supertrees/stable.hpp"

namespace supertrees::gibbs {

/// v_k <= C q^k for every k past the stored part of v.
struct VTailBound {
  double C = 0.0;
  double q = 0.0;
};

/// Weight sequences of a Gibbs partition. Entries past the stored length are
/// zero unless `v_tail` declares an infinite tail for v.
struct GibbsWeights {
  std::vector<mpq_class> v;  // v[0] is ignored
  std::vector<mpq_class> w;
  std::optional<VTailBound> v_tail;
  /// Optional exact shortcut for [x^n] W^k; used instead of the power DP.
  std::function<mpq_class(std::size_t n, std::size_t k)> inner_power;

  const mpq_class& v_at(std::size_t k) const {
    static const mpq_class zero(0);
    return k < v.size() ? v[k] : zero;
  }
  const mpq_class& w_at(std::size_t m) const {
    static const mpq_class zero(0);
    return m < w.size() ? w[m] : zero;
  }
};

inline void validate(const GibbsWeights& g) {
  bool any_v = false, any_w = false;
  for (std::size_t k = 1; k < g.v.size(); ++k) {
    detail::require(sgn(g.v[k]) >= 0, "v must be nonnegative");
    any_v = any_v || sgn(g.v[k]) > 0;
  }
  for (std::size_t m = 0; m < g.w.size(); ++m) {
    detail::require(sgn(g.w[m]) >= 0, "w must be nonnegative");
    if (m >= 1) any_w = any_w || sgn(g.w[m]) > 0;
  }
  detail::require(g.w_at(0) < 1, "w_0 must be below 1");
  detail::require(any_v || (g.v_tail && g.v_tail->C > 0.0), "v needs a positive entry");
  detail::require(any_w, "w needs a positive entry of positive index");
  if (g.v_tail) detail::require(g.v_tail->C >= 0.0 && g.v_tail->q >= 0.0, "invalid v tail bound");
}

struct LawOptions {
  std::size_t K_max = 0;           // truncation of the k-sum when v has an infinite tail and w_0 > 0
  double tail_tolerance = 1e-12;   // bound on the dropped mass relative to u_n
};

/// Exact law of N_n. prob[k] = P(N_n = k) for k = 0..prob.size()-1.
struct ComponentLaw {
  std::size_t n = 0;
  mpq_class u_n;
  std::vector<mpq_class> prob;
  double tail_bound = 0.0;  // relative mass dropped by truncation, 0 if exact

  double probability(std::size_t k) const { return k < prob.size() ? to_double(prob[k]) : 0.0; }
  double mean() const {
    mpq_class m = 0;
    for (std::size_t k = 0; k < prob.size(); ++k) m += prob[k] * static_cast<unsigned long>(k);
    return to_double(m);
  }
};

namespace impl {

inline std::size_t first_positive(const std::vector<mpq_class>& w, std::size_t n) {
  for (std::size_t m = 0; m < w.size() && m <= n; ++m)
    if (sgn(w[m]) > 0) return m;
  return n + 1;
}

// sum_{m<=n} w_m r^m in double, through logs so that huge w_m are fine.
inline double truncated_w_at(const GibbsWeights& g, std::size_t n, double r) {
  double total = 0.0;
  for (std::size_t m = 0; m < g.w.size() && m <= n; ++m)
    if (sgn(g.w[m]) > 0) total += std::exp(log_of(g.w[m]) + static_cast<double>(m) * std::log(r));
  return total;
}

// Certified upper bound for sum_{k>K} v_k [x^n] W^k using
// [x^n] W^k <= W_n(r)^k r^(-n) for every r > 0.
inline double tail_mass_bound(const GibbsWeights& g, std::size_t n, std::size_t K) {
  const VTailBound t = *g.v_tail;
  double best = std::numeric_limits<double>::infinity();
  for (int i = -400; i <= 400; ++i) {
    const double r = std::exp(0.05 * i);
    const double ratio = t.q * truncated_w_at(g, n, r);
    if (!(ratio < 1.0)) continue;
    const double log_bound = std::log(t.C) - static_cast<double>(n) * std::log(r) +
                             static_cast<double>(K + 1) * std::log(ratio) - std::log1p(-ratio);
    best = std::min(best, std::exp(log_bound));
  }
  return best;
}

// [x^n] W^k for k = 0..K, exactly.
inline std::vector<mpq_class> power_column(const GibbsWeights& g, std::size_t n, std::size_t K) {
  std::vector<mpq_class> col(K + 1);
  col[0] = n == 0 ? 1 : 0;
  if (g.inner_power) {
    for (std::size_t k = 1; k <= K; ++k) col[k] = g.inner_power(n, k);
    return col;
  }
  std::vector<mpq_class> wq(n + 1);
  for (std::size_t m = 0; m <= n; ++m) wq[m] = g.w_at(m);
  const mpz_class den = lcm_of_denominators(wq);
  const std::vector<mpz_class> wz = over_common_denominator(wq, den);
  const std::size_t lo = series::impl::lowest_nonzero(wz);
  std::vector<mpz_class> power = wz;
  std::size_t power_lo = lo;
  mpz_class den_power = den;
  for (std::size_t k = 1; k <= K; ++k) {
    if (k > 1) {
      power = series::impl::truncated_product(power, power_lo, wz, lo, n);
      power_lo += lo;
      den_power *= den;
    }
    if (power_lo > n) break;
    col[k] = mpq_class(power[n], den_power);
    col[k].canonicalize();
  }
  return col;
}

// Largest k with a possibly nonzero term, and whether the sum was truncated.
inline std::pair<std::size_t, bool> k_range(const GibbsWeights& g, std::size_t n, const LawOptions& opt) {
  const std::size_t lo = first_positive(g.w, n);
  const std::size_t stored = g.v.empty() ? 0 : g.v.size() - 1;
  if (lo >= 1) {
    // Every component has at least `lo` elements.
    std::size_t K = n / lo;
    if (!g.v_tail) K = std::min(K, stored);
    return {K, false};
  }
  if (!g.v_tail) return {stored, false};
  detail::require(opt.K_max >= 1, "w_0 > 0 with an infinite v tail needs a truncation bound K_max");
  return {opt.K_max, true};
}

}  // namespace impl

/// Exact law of the number of components N_n.
inline ComponentLaw component_count_law(const GibbsWeights& g, std::size_t n, const LawOptions& opt = {}) {
  validate(g);
  detail::require(n >= 1, "partition size must be at least 1");
  const auto [K, truncated] = impl::k_range(g, n, opt);
  const std::vector<mpq_class> col = impl::power_column(g, n, K);

  ComponentLaw law;
  law.n = n;
  law.prob.assign(K + 1, mpq_class(0));
  mpq_class u = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    law.prob[k] = g.v_at(k) * col[k];
    u += law.prob[k];
  }
  if (sgn(u) == 0) throw degenerate_error("u_n = 0: no partition of this size has positive weight");
  for (auto& p : law.prob) p /= u;
  law.u_n = u;
  if (truncated) {
    law.tail_bound = impl::tail_mass_bound(g, n, K) / to_double(u);
    if (!(law.tail_bound <= opt.tail_tolerance)) {
      std::ostringstream msg;
      msg << "truncation at K_max = " << K << " not certified: tail bound " << law.tail_bound;
      throw truncation_error(msg.str());
    }
  }
  return law;
}

/// Draws (N_n, component sizes) from the Gibbs partition of size n.
///
/// The tables hold the law of sums of j independent sizes with
/// P(size = m) = w_m r^m / W_n(r); given k the sizes are drawn one after the
/// other from their conditional law. The law of the sizes given the sum does
/// not depend on r, which only serves to keep the tables in range.
class GibbsSampler {
 public:
  GibbsSampler(const GibbsWeights& g, std::size_t n, const LawOptions& opt = {}) : n_(n) {
    validate(g);
    detail::require(n >= 1, "partition size must be at least 1");
    const auto range = impl::k_range(g, n, opt);
    const std::size_t K = range.first;

    // r with w_m r^m of order one at the top of the support.
    std::size_t top = 0;
    for (std::size_t m = 1; m <= n; ++m)
      if (sgn(g.w_at(m)) > 0) top = m;
    if (top == 0) throw degenerate_error("u_n = 0: w vanishes on 1..n");
    const double log_r = -log_of(g.w_at(top)) / static_cast<double>(top);
    std::vector<double> logw(n + 1, -std::numeric_limits<double>::infinity());
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= n; ++m)
      if (sgn(g.w_at(m)) > 0) {
        logw[m] = log_of(g.w_at(m)) + static_cast<double>(m) * log_r;
        log_max = std::max(log_max, logw[m]);
      }
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - log_max);
    const double log_z = log_max + std::log(z);
    p_.assign(n + 1, 0.0);
    for (std::size_t m = 0; m <= n; ++m) p_[m] = std::exp(logw[m] - log_z);

    table_.assign(K + 1, std::vector<double>(n + 1, 0.0));
    table_[0][0] = 1.0;
    for (std::size_t j = 1; j <= K; ++j) {
      const auto& prev = table_[j - 1];
      auto& row = table_[j];
      for (std::size_t a = 0; a <= n; ++a) {
        if (prev[a] == 0.0) continue;
        for (std::size_t m = 0; a + m <= n; ++m) row[a + m] += prev[a] * p_[m];
      }
    }

    // P(N_n = k) proportional to v_k W_n(r)^k P(S_k = n).
    std::vector<double> logk(K + 1, -std::numeric_limits<double>::infinity());
    double kmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= K; ++k) {
      if (sgn(g.v_at(k)) == 0 || table_[k][n] == 0.0) continue;
      logk[k] = log_of(g.v_at(k)) + static_cast<double>(k) * log_z + std::log(table_[k][n]);
      kmax = std::max(kmax, logk[k]);
    }
    if (!std::isfinite(kmax)) throw degenerate_error("u_n = 0: no partition of this size has positive weight");
    k_weights_.assign(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) k_weights_[k] = std::exp(logk[k] - kmax);
    k_table_ = AliasTable(k_weights_);
  }

  std::size_t n() const { return n_; }

  /// Probability of N_n = k from the sampling tables.
  double count_probability(std::size_t k) const {
    double total = 0.0;
    for (double x : k_weights_) total += x;
    return k < k_weights_.size() ? k_weights_[k] / total : 0.0;
  }

  struct Draw {
    std::size_t k = 0;
    std::vector<std::size_t> sizes;
  };

  template <class Engine>
  Draw operator()(Engine& rng) const {
    Draw d;
    d.k = k_table_(rng);
    d.sizes.reserve(d.k);
    std::size_t rest = n_;
    for (std::size_t j = d.k; j >= 2; --j) {
      const auto& below = table_[j - 1];
      double u = uniform01(rng) * table_[j][rest];
      std::size_t m = 0;
      std::size_t last = 0;
      for (; m <= rest; ++m) {
        const double t = p_[m] * below[rest - m];
        if (t == 0.0) continue;
        last = m;
        u -= t;
        if (u < 0.0) break;
      }
      if (m > rest) m = last;  // rounding at the end of the scan
      d.sizes.push_back(m);
      rest -= m;
    }
    if (d.k >= 1) d.sizes.push_back(rest);
    return d;
  }

 private:
  std::size_t n_;
  std::vector<double> p_;
  std::vector<std::vector<double>> table_;
  std::vector<double> k_weights_;
  AliasTable k_table_;
};

template <class Engine>
GibbsSampler::Draw sample_gibbs(const GibbsSampler& sampler, Engine& rng) {
  return sampler(rng);
}

// ---------------------------------------------------------------------------
// Dilute regime

/// Parameters of the dilute regime: v_n = L_v n^(-beta-1) rho_v^(-n),
/// w_n ~ c_w n^(-alpha-1) rho_w^(-n), rho_v = W(rho_w). L_v is a constant.
struct DiluteParams {
  double alpha = 0.5;
  double beta = 0.5;
  double c_w = 1.0;
  double rho_w = 1.0;
  double W_at_rho = 1.0;
  double gamma = 1.0;
  double L_v = 1.0;

  double c_over_W() const { return c_w / W_at_rho; }
  StableOneSided stable() const { return {alpha, gamma}; }
};

inline DiluteParams make_dilute_params(double alpha, double beta, double c_w, double rho_w, double W_at_rho,
                                       double L_v = 1.0) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  detail::require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  detail::require(c_w > 0.0 && rho_w > 0.0 && W_at_rho > 0.0 && L_v > 0.0,
                  "c_w, rho_w, W(rho_w) and L_v must be positive");
  DiluteParams p{alpha, beta, c_w, rho_w, W_at_rho, 0.0, L_v};
  p.gamma = std::pow(c_w / (W_at_rho * alpha) * boost::math::tgamma(1.0 - alpha) *
                         std::cos(std::numbers::pi * alpha / 2.0),
                     1.0 / alpha);
  return p;
}

/// Constant C in u_n ~ C n^(-1-alpha beta) rho_w^(-n).
inline double partition_function_constant(const DiluteParams& p) {
  return p.L_v * stable_fractional_moment(p.alpha, p.beta, p.c_over_W());
}

/// Density of the limit Z of N_n / n^alpha.
inline double ftilde_density(const DiluteParams& p, double x) {
  detail::require(x > 0.0, "ftilde needs x > 0");
  const double moment = stable_fractional_moment(p.alpha, p.beta, p.c_over_W());
  const double y = std::pow(x, -1.0 / p.alpha);
  if (y == 0.0) return 0.0;
  const double f = stable_density(p.stable(), y);
  if (f == 0.0) return 0.0;
  // x^-(1 + beta + 1/alpha) = y^(alpha (1 + beta) + 1), in logs since both
  // factors under- or overflow for small x
  return std::exp(std::log(f) + (p.alpha * (1.0 + p.beta) + 1.0) * std::log(y)) / moment;
}

/// sup over l >= delta n^alpha of |n^alpha P(N_n = l) - density(l / n^alpha)|.
inline double llt_discrepancy(const ComponentLaw& law, double alpha, double delta,
                              const std::function<double(double)>& density) {
  const double scale = std::pow(static_cast<double>(law.n), alpha);
  const auto first = static_cast<std::size_t>(std::ceil(delta * scale));
  double sup = 0.0;
  for (std::size_t l = std::max<std::size_t>(first, 1); l <= law.n; ++l) {
    const double x = static_cast<double>(l) / scale;
    const double err = std::abs(scale * law.probability(l) - density(x));
    sup = std::max(sup, err);
  }
  return sup;
}

inline double llt_discrepancy(const GibbsWeights& g, const DiluteParams& p, std::size_t n, double delta = 0.1) {
  const ComponentLaw law = component_count_law(g, n);
  return llt_discrepancy(law, p.alpha, delta, [&](double x) { return ftilde_density(p, x); });
}

/// Inverse-CDF sampler for Z, from a tabulated distribution function of
/// ftilde on a logarithmic grid.
class FtildeSampler {
 public:
  explicit FtildeSampler(const DiluteParams& p, double x_lo = 1e-6, double x_hi = 50.0, std::size_t cells = 4000)
      : beta_(p.beta) {
    grid_.resize(cells + 1);
    cdf_.assign(cells + 1, 0.0);
    const double a = std::log(x_lo), b = std::log(x_hi);
    for (std::size_t i = 0; i <= cells; ++i) grid_[i] = std::exp(a + (b - a) * static_cast<double>(i) / cells);
    auto f = [&](double x) { return ftilde_density(p, x); };
    // Mass below x_lo: ftilde is integrable at 0 with a power singularity of
    // order at most x^(-beta); treat it as that power law on (0, x_lo).
    cdf_[0] = f(x_lo) * x_lo / (1.0 - p.beta);
    for (std::size_t i = 1; i <= cells; ++i)
      cdf_[i] = cdf_[i - 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, grid_[i - 1], grid_[i], 2);
    total_ = cdf_.back();
  }

  double tabulated_mass() const { return total_; }

  template <class Engine>
  double operator()(Engine& rng) const {
    const double u = uniform01(rng) * total_;
    if (u < cdf_[0]) return grid_[0] * std::pow(u / cdf_[0], 1.0 / (1.0 - beta_));
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return grid_.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double t = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
    return grid_[i - 1] + t * (grid_[i] - grid_[i - 1]);
  }

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
  double total_ = 0.0;
  double beta_ = 0.5;
};

// ---------------------------------------------------------------------------
// The Kemp scheme F_d = F_1(x F_{d-1}): v_k = f_{1,k}, w_m = f_{d-1,m-1}.

inline double kemp_constant(int d) {
  const double e = std::ldexp(1.0, -d);
  return std::pow(2.0, 2.0 * (1.0 - e)) / std::abs(boost::math::tgamma(-e));
}

inline GibbsWeights kemp_scheme(int d, std::size_t n) {
  detail::require(d >= 2, "the Kemp scheme needs d >= 2");
  const series::CoeffSeries outer = series::f1_series(n);
  const series::CoeffSeries inner = series::kemp_series(d - 1, n);
  GibbsWeights g;
  g.v.assign(outer.coeffs().begin(), outer.coeffs().end());
  g.w.assign(n + 1, mpq_class(0));
  for (std::size_t m = 1; m <= n; ++m) g.w[m] = inner[m - 1];
  if (d == 2) {
    // [x^n](x F_1)^k = [x^(n-k)] F_1^k = k/(n-k) binom(2(n-k), n-2k) by
    // Lagrange inversion of F_1 = x (1 + F_1)^2.
    g.inner_power = [](std::size_t n_, std::size_t k) -> mpq_class {
      if (2 * k > n_) return 0;
      const std::size_t m = n_ - k;
      mpq_class out(binomial(2 * m, m - k) * k, mpz_class(static_cast<unsigned long>(m)));
      out.canonicalize();
      return out;
    };
  }
  return g;
}

inline DiluteParams kemp_dilute_params(int d) {
  detail::require(d >= 2, "the Kemp scheme needs d >= 2");
  const double alpha = std::ldexp(1.0, -(d - 1));
  return make_dilute_params(alpha, 0.5, kemp_constant(d - 1) / 4.0, 0.25, 0.25, kemp_constant(1));
}

// ---------------------------------------------------------------------------
// CSV

inline void write_law_csv(std::ostream& out, const ComponentLaw& law, bool header = true) {
  if (header) out << "n,k,prob_num,prob_den,prob_float\n";
  for (std::size_t k = 0; k < law.prob.size(); ++k) {
    if (sgn(law.prob[k]) == 0) continue;
    out << law.n << ',' << k << ',' << law.prob[k].get_num().get_str() << ','
        << law.prob[k].get_den().get_str() << ',' << law.probability(k) << '\n';
  }
}

inline void write_ftilde_csv(std::ostream& out, const DiluteParams& p, std::span<const double> xs) {
  out << "x,ftilde\n";
  for (double x : xs) out << x << ',' << ftilde_density(p, x) << '\n';
}

}  // namespace supertrees::gibbs
