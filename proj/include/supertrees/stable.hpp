#pragma once

// One-sided stable laws S_alpha(gamma, 1, 0), 0 < alpha < 1.
//
// The parametrization is the characteristic-function one,
//   E exp(i t X) = exp(-gamma^alpha |t|^alpha (1 - i sign(t) tan(pi alpha / 2))),
// whose support is the positive half-line; its Laplace transform is
//   E exp(-lambda X) = exp(-(gamma^alpha / cos(pi alpha / 2)) lambda^alpha).
// So X = sigma X1 with sigma = gamma / cos(pi alpha / 2)^(1/alpha) and X1 the
// standard positive stable law, E exp(-lambda X1) = exp(-lambda^alpha).
//
// X1 has Kanter's representation X1 = (A(U) / E)^((1-alpha)/alpha) with U
// uniform on (0, pi), E standard exponential and
//   A(u) = (sin(alpha u)^alpha sin((1-alpha) u)^(1-alpha) / sin u)^(1/(1-alpha)),
// which gives the density as an integral over (0, pi) of a bounded function.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "supertrees/error.hpp"

namespace supertrees::gibbs {

struct StableOneSided {
  double alpha = 0.5;
  double gamma = 1.0;
};

inline void validate(const StableOneSided& s) {
  detail::require(s.alpha > 0.0 && s.alpha < 1.0, "stable index must lie in (0, 1)");
  detail::require(s.gamma > 0.0 && std::isfinite(s.gamma), "stable scale must be positive");
}

/// sigma with X = sigma * X1, X1 having Laplace transform exp(-lambda^alpha).
inline double laplace_scale(const StableOneSided& s) {
  validate(s);
  return s.gamma / std::pow(std::cos(std::numbers::pi * s.alpha / 2.0), 1.0 / s.alpha);
}

inline double kanter_a(double alpha, double u) {
  const double num = std::pow(std::sin(alpha * u), alpha) * std::pow(std::sin((1.0 - alpha) * u), 1.0 - alpha);
  return std::pow(num / std::sin(u), 1.0 / (1.0 - alpha));
}

/// Density of the standard positive stable law X1 at x > 0.
inline double standard_stable_density(double alpha, double x, double tolerance = 1e-12) {
  detail::require(alpha > 0.0 && alpha < 1.0, "stable index must lie in (0, 1)");
  detail::require(x > 0.0, "stable density needs x > 0");
  // Far tail: the convergent series in x^-alpha, which is quick there.
  if (std::pow(x, -alpha) <= 0.05) {
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
      const double size = std::exp(std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0) - (k * alpha + 1.0) * std::log(x));
      const double term = size * std::sin(k * std::numbers::pi * alpha);
      sum += (k % 2 == 1 ? term : -term);
      if (size < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::numbers::pi;
  }
  const double t = std::pow(x, -alpha / (1.0 - alpha));
  auto integrand = [&](double u) {
    const double a = kanter_a(alpha, u);
    if (!std::isfinite(a)) return 0.0;
    const double e = a * t;
    return e > 745.0 ? 0.0 : a * std::exp(-e);
  };
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0, l1 = 0.0;
  const double value = integrator.integrate(integrand, 0.0, std::numbers::pi, tolerance, &error, &l1);
  if (value == 0.0) return 0.0;  // underflow near the origin, where the prefactor blows up
  const double prefactor = alpha / (1.0 - alpha) * std::pow(x, -1.0 / (1.0 - alpha)) / std::numbers::pi;
  if (!std::isfinite(value) || error > 1e-8 * std::max(1.0, l1)) {
    std::ostringstream msg;
    msg << "stable density quadrature did not converge at x = " << x << " (error estimate " << error << ")";
    throw convergence_error(msg.str());
  }
  return prefactor * value;
}

/// Density of S_alpha(gamma, 1, 0) at x > 0.
inline double stable_density(const StableOneSided& s, double x) {
  const double sigma = laplace_scale(s);
  return standard_stable_density(s.alpha, x / sigma) / sigma;
}

/// alpha * E[X^(alpha beta)] for X ~ S_alpha(gamma, 1, 0) with gamma given by
/// the dilute-regime formula; depends on c_w / W(rho_w) only.
inline double stable_fractional_moment(double alpha, double beta, double c_over_W) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  detail::require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  detail::require(c_over_W > 0.0, "c_w / W(rho_w) must be positive");
  using boost::math::tgamma;
  return tgamma(1.0 - beta) * std::pow(alpha, 1.0 - beta) * std::pow(c_over_W * tgamma(1.0 - alpha), beta) /
         tgamma(1.0 - alpha * beta);
}

/// E[X^p] for X ~ S_alpha(gamma, 1, 0), p < alpha: sigma^p Gamma(1 - p/alpha) / Gamma(1 - p).
inline double stable_moment(const StableOneSided& s, double p) {
  detail::require(p < s.alpha, "stable moments exist only below the index");
  using boost::math::tgamma;
  return std::pow(laplace_scale(s), p) * tgamma(1.0 - p / s.alpha) / tgamma(1.0 - p);
}

}  // namespace supertrees::gibbs
