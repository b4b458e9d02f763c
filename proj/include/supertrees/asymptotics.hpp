#pragma once

// Estimation of c_n ~ C * b^n * n^a from exact coefficients.
//
// log c_n is regressed on n, log n, 1 and the correction terms
// n^(-s), n^(-2s), ..., n^(-order*s). This is Richardson extrapolation with
// the correction exponents made explicit: composition schemes produce
// corrections in powers of n^(-1/4) (d = 2), n^(-1/8) (d = 3), ..., which an
// integer-step Richardson table cannot remove.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "supertrees/bignum.hpp"
#include "supertrees/error.hpp"
#include "supertrees/series.hpp"

namespace supertrees::series {

struct FitWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

struct AsymptoticFitOptions {
  int order = 2;                 // number of correction terms
  double correction_step = 1.0;  // s in n^(-j s)
  double tolerance = 1e-2;       // allowed spread of the trailing diagnostics
  int diagnostic_points = 8;
};

struct FitPoint {
  std::size_t upper = 0;  // window is [lo, upper]
  double base = 0.0;
  double exponent = 0.0;
  double constant = 0.0;
};

struct AsymptoticEstimate {
  double base = 0.0;
  double exponent = 0.0;
  double constant = 0.0;
  std::vector<FitPoint> diagnostics;
  bool monotone = false;  // exponent diagnostics move in one direction
  double exponent_spread = 0.0;
  double constant_spread = 0.0;  // relative
};

class nonconvergence_error : public convergence_error {
 public:
  nonconvergence_error(const std::string& what, AsymptoticEstimate estimate)
      : convergence_error(what), estimate_(std::move(estimate)) {}
  const AsymptoticEstimate& estimate() const { return estimate_; }

 private:
  AsymptoticEstimate estimate_;
};

namespace impl {

inline FitPoint fit_window(const std::vector<double>& log_c, std::size_t lo, std::size_t hi,
                           const AsymptoticFitOptions& opt) {
  const std::size_t rows = hi - lo + 1;
  const int cols = 3 + opt.order;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const double n = static_cast<double>(lo + r);
    const auto i = static_cast<Eigen::Index>(r);
    A(i, 0) = n;
    A(i, 1) = std::log(n);
    A(i, 2) = 1.0;
    for (int j = 1; j <= opt.order; ++j) A(i, 2 + j) = std::pow(n, -j * opt.correction_step);
    y(i) = log_c[lo + r];
  }
  Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
  for (int j = 0; j < cols; ++j) A.col(j) /= scale(j);
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  x = x.cwiseQuotient(scale);
  return FitPoint{hi, std::exp(x(0)), x(1), std::exp(x(2))};
}

}  // namespace impl

/// Fits coeffs[n] ~ constant * base^n * n^exponent on `window`.
///
/// The diagnostics are fits on the nested windows [lo, m] for upper ends m
/// spread over the second half of the window; the last one is the reported
/// estimate. Throws nonconvergence_error when the trailing half of the
/// diagnostics spreads by more than `tolerance` (absolute for the exponent,
/// relative for the constant).
inline AsymptoticEstimate asymptotic_fit(const CoeffSeries& series, FitWindow window,
                                         const AsymptoticFitOptions& opt = {}) {
  detail::require(window.lo >= 1 && window.lo < window.hi, "fit window must satisfy 1 <= lo < hi");
  detail::require(window.hi <= series.order(), "fit window exceeds the computed order");
  detail::require(opt.order >= 0 && opt.correction_step > 0.0, "invalid fit options");
  detail::require(window.hi - window.lo + 1 >= static_cast<std::size_t>(4 * (3 + opt.order)),
                  "fit window too short for the requested order");
  std::vector<double> log_c(window.hi + 1, 0.0);
  for (std::size_t n = window.lo; n <= window.hi; ++n) {
    detail::require(sgn(series[n]) > 0, "coefficients must be positive on the fit window");
    log_c[n] = log_of(series[n]);
  }

  AsymptoticEstimate est;
  const int points = std::max(2, opt.diagnostic_points);
  const std::size_t span = window.hi - window.lo;
  for (int p = 0; p < points; ++p) {
    const std::size_t upper = window.lo + span / 2 + (span - span / 2) * static_cast<std::size_t>(p) /
                                                          static_cast<std::size_t>(points - 1);
    est.diagnostics.push_back(impl::fit_window(log_c, window.lo, upper, opt));
  }
  const FitPoint& last = est.diagnostics.back();
  est.base = last.base;
  est.exponent = last.exponent;
  est.constant = last.constant;

  bool up = true, down = true;
  for (std::size_t i = 1; i < est.diagnostics.size(); ++i) {
    up = up && est.diagnostics[i].exponent >= est.diagnostics[i - 1].exponent;
    down = down && est.diagnostics[i].exponent <= est.diagnostics[i - 1].exponent;
  }
  est.monotone = up || down;

  const std::size_t tail = est.diagnostics.size() / 2;
  double emin = last.exponent, emax = last.exponent, cmin = last.constant, cmax = last.constant;
  for (std::size_t i = est.diagnostics.size() - tail - 1; i < est.diagnostics.size(); ++i) {
    emin = std::min(emin, est.diagnostics[i].exponent);
    emax = std::max(emax, est.diagnostics[i].exponent);
    cmin = std::min(cmin, est.diagnostics[i].constant);
    cmax = std::max(cmax, est.diagnostics[i].constant);
  }
  est.exponent_spread = emax - emin;
  est.constant_spread = (cmax - cmin) / last.constant;
  if (!std::isfinite(last.base) || !std::isfinite(last.constant) ||
      est.exponent_spread > opt.tolerance || est.constant_spread > opt.tolerance) {
    std::ostringstream msg;
    msg << "asymptotic fit did not settle: exponent spread " << est.exponent_spread
        << ", relative constant spread " << est.constant_spread;
    throw nonconvergence_error(msg.str(), est);
  }
  return est;
}

}  // namespace supertrees::series
