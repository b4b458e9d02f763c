#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>

#include "oracles/stable_oracle.hpp"
#include "supertrees/gibbs.hpp"
#include "supertrees/stable.hpp"

using namespace supertrees;
using gibbs::StableOneSided;

namespace {

double integrate_half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto g = [&](double x) { return std::isfinite(x) ? f(x) : 0.0; };
  return integrator.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-10);
}

}  // namespace

TEST(StableDensity, HalfIsLevyLaw) {
  for (double gamma : {0.5, 1.0, 1.0 / std::sqrt(std::numbers::pi)}) {
    const StableOneSided s{0.5, gamma};
    for (double x : {0.5, 1.0, 2.0}) EXPECT_NEAR(gibbs::stable_density(s, x), oracle::levy_density(gamma, x), 1e-8);
    for (double x : {50.0, 1e3, 1e6, 1e40}) {
      EXPECT_NEAR(gibbs::stable_density(s, x) / oracle::levy_density(gamma, x), 1.0, 1e-10) << x;
    }
  }
}

TEST(StableDensity, MatchesCharacteristicFunctionInversion) {
  for (double alpha : {0.5, 0.7}) {
    for (double gamma : {1.0, 0.6}) {
      const StableOneSided s{alpha, gamma};
      for (double x : {0.3, 0.8, 1.5, 3.0, 6.0}) {
        const double ref = oracle::stable_density_by_inversion(alpha, gamma, x);
        EXPECT_NEAR(gibbs::stable_density(s, x), ref, 1e-7 * std::max(1.0, ref)) << alpha << " " << x;
      }
    }
  }
}

TEST(StableDensity, IntegratesToOne) {
  for (double alpha : {0.5, 0.7, 0.25}) {
    const StableOneSided s{alpha, 1.0};
    const double total = integrate_half_line([&](double x) { return gibbs::stable_density(s, x); });
    EXPECT_NEAR(total, 1.0, 1e-6) << alpha;
  }
}

TEST(StableDensity, RejectsInvalidInput) {
  EXPECT_THROW(gibbs::stable_density({1.2, 1.0}, 1.0), precondition_error);
  EXPECT_THROW(gibbs::stable_density({0.5, -1.0}, 1.0), precondition_error);
  EXPECT_THROW(gibbs::stable_density({0.5, 1.0}, 0.0), precondition_error);
}

TEST(StableFractionalMoment, KempSecondDimension) {
  const double v = gibbs::stable_fractional_moment(0.5, 0.5, 1.0 / std::sqrt(std::numbers::pi));
  EXPECT_NEAR(v, 1.02276, 1e-5);
  EXPECT_NEAR(v / std::sqrt(std::numbers::pi), 0.57703, 1e-5);
  EXPECT_NEAR(v / std::sqrt(std::numbers::pi), gibbs::kemp_constant(2), 1e-12);
}

TEST(StableFractionalMoment, MatchesQuadrature) {
  for (auto [alpha, beta, c] : {std::tuple{0.5, 0.5, 0.5641895835477563}, std::tuple{0.25, 0.5, 0.3},
                                std::tuple{0.7, 0.3, 1.2}}) {
    const auto p = gibbs::make_dilute_params(alpha, beta, c, 1.0, 1.0);
    const double moment = integrate_half_line(
        [&](double x) { return std::pow(x, alpha * beta) * gibbs::stable_density(p.stable(), x); });
    const double v = gibbs::stable_fractional_moment(alpha, beta, c);
    EXPECT_NEAR(alpha * moment / v, 1.0, 1e-6) << alpha << " " << beta;
  }
}

TEST(StableFractionalMoment, FirstDimensionConstant) {
  // Gamma(-1/2) = -2 sqrt(pi) by reflection.
  EXPECT_NEAR(gibbs::kemp_constant(1), 1.0 / std::sqrt(std::numbers::pi), 1e-14);
}

TEST(StableMoment, AgreesWithQuadrature) {
  const StableOneSided s{0.6, 0.8};
  for (double p : {0.1, 0.3, -0.5}) {
    const double q = integrate_half_line([&](double x) { return std::pow(x, p) * gibbs::stable_density(s, x); });
    EXPECT_NEAR(q / gibbs::stable_moment(s, p), 1.0, 1e-6) << p;
  }
  EXPECT_THROW(gibbs::stable_moment(s, 0.6), precondition_error);
}
