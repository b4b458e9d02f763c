#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/enumeration.hpp"
#include "supertrees/asymptotics.hpp"
#include "supertrees/gibbs.hpp"
#include "supertrees/series.hpp"

using namespace supertrees;
using series::CoeffSeries;

namespace {

std::vector<std::string> as_strings(const CoeffSeries& s) {
  std::vector<std::string> out;
  for (const auto& c : s.coeffs()) out.push_back(c.get_str());
  return out;
}

using Strings = std::vector<std::string>;

CoeffSeries identity_series(std::size_t N) {
  std::vector<mpq_class> c(N + 1, mpq_class(0));
  c[1] = 1;
  return CoeffSeries(c, series::SeriesKind::ordinary, "x");
}

}  // namespace

TEST(F1Series, SmallOrders) {
  EXPECT_EQ(as_strings(series::f1_series(3)), (Strings{"0", "1", "2", "5"}));
  EXPECT_EQ(as_strings(series::f1_series(1)), (Strings{"0", "1"}));
  EXPECT_EQ(series::f1_series(5)[5], 42);
}

TEST(F1Series, MatchesGeneratedBinaryTrees) {
  const auto s = series::f1_series(8);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(s[static_cast<std::size_t>(n)], oracle::kemp_trees(1, n).size()) << n;
}

TEST(ComposeSeries, SecondDimensionFromFirst) {
  const auto f1 = series::f1_series(5);
  const auto u = series::compose_series(f1, series::shifted(f1, 1), 5);
  EXPECT_EQ(as_strings(u), (Strings{"0", "0", "1", "2", "7", "22"}));
}

TEST(ComposeSeries, IdentityOuterSeries) {
  const auto w = series::shifted(series::plane_series(10), 1);
  const auto u = series::compose_series(identity_series(10), w, 10);
  EXPECT_EQ(as_strings(u), as_strings(w));
}

TEST(ComposeSeries, PlanarSupertreesMatchGenerator) {
  const auto g = series::plane_series(8);
  const auto k = series::compose_series(g, series::shifted(g, 1), 8);
  const auto direct = series::planar_supertree_series(8, false);
  for (std::size_t n = 0; n <= 8; ++n) {
    EXPECT_EQ(k[n], direct[n]);
    if (n >= 1) {
      EXPECT_EQ(k[n], oracle::planar_supertrees(static_cast<int>(n), false).size()) << n;
    }
  }
}

TEST(ComposeSeries, PlaneSeriesAtItsRadius) {
  // G = z + G^2 gives G(1/4) = 1/2, so z G(z) is 1/8 there.
  const auto g = series::plane_series(3000);
  double partial = 0.0, previous = 0.0;
  for (std::size_t n = 1; n <= 3000; ++n) {
    partial += std::exp(log_of(g[n]) - static_cast<double>(n) * std::log(4.0));
    ASSERT_GT(partial, previous);
    previous = partial;
  }
  EXPECT_LT(partial, 0.5);
  EXPECT_GT(partial, 0.49);
}

TEST(ComposeSeries, RejectsInnerConstantTerm) {
  const auto g = series::plane_series(5);
  std::vector<mpq_class> c(6, mpq_class(1, 2));
  const CoeffSeries bad(c, series::SeriesKind::ordinary, "bad");
  EXPECT_THROW(series::compose_series(g, bad, 5), precondition_error);
}

TEST(KempSeries, Examples) {
  EXPECT_EQ(series::kemp_series(2, 10)[4], 7);
  EXPECT_EQ(as_strings(series::kemp_series(1, 30)), as_strings(series::f1_series(30)));
}

TEST(KempSeries, CompositionAgreesWithRootDecomposition) {
  for (int d = 2; d <= 5; ++d) {
    const auto direct = series::kemp_series(d, 60);
    const auto composed = series::compose_series(series::f1_series(60), series::shifted(series::kemp_series(d - 1, 60), 1), 60);
    EXPECT_EQ(as_strings(direct), as_strings(composed)) << "d=" << d;
  }
}

TEST(KempSeries, MatchesGeneratedTrees) {
  for (int d = 1; d <= 4; ++d) {
    const auto s = series::kemp_series(d, 8);
    for (int n = 1; n <= 8; ++n)
      EXPECT_EQ(s[static_cast<std::size_t>(n)], oracle::kemp_trees(d, n).size()) << "d=" << d << " n=" << n;
  }
}

TEST(KempSeries, CoefficientInvariants) {
  for (int d = 1; d <= 4; ++d) {
    const auto s = series::kemp_series(d, 200);
    EXPECT_TRUE(s.is_integral());
    EXPECT_EQ(s[0], 0);
    for (std::size_t n = 0; n <= 200; ++n) EXPECT_GE(sgn(s[n]), 0);
  }
}

TEST(KempSeries, PartialSumsAtQuarterIncreaseBelowOne) {
  for (int d = 1; d <= 3; ++d) {
    const auto s = series::kemp_series(d, 1500);
    double partial = 0.0;
    for (std::size_t n = 1; n <= 1500; ++n) {
      const double term = sgn(s[n]) > 0 ? std::exp(log_of(s[n]) - static_cast<double>(n) * std::log(4.0)) : 0.0;
      partial += term;
      ASSERT_LT(partial, 1.0);
    }
    // The terms decay like n^(-1-2^-d), so the missing tail is of order
    // N^(-2^-d); for d = 1 it is 2 / sqrt(pi N) to leading order.
    if (d == 1) {
      EXPECT_NEAR(1.0 - partial, 2.0 / std::sqrt(std::numbers::pi * 1500.0), 1e-3);
    } else {
      const double tail = gibbs::kemp_constant(d) * std::ldexp(1.0, d) * std::pow(1500.0, -std::ldexp(1.0, -d));
      EXPECT_GT(1.0 - partial, 0.5 * tail) << d;
      EXPECT_LT(1.0 - partial, 2.0 * tail) << d;
    }
  }
}

TEST(LabelledSeries, Examples) {
  EXPECT_EQ(series::labelled_iterated_series(1, 4)[4], mpq_class(8, 3));
  const auto t2 = series::labelled_iterated_series(2, 4);
  EXPECT_EQ(t2[2], 1);
  EXPECT_EQ(t2.count(2), 2);
  EXPECT_EQ(t2[4], mpq_class(5, 2));
  EXPECT_EQ(t2.count(4), 60);
  EXPECT_EQ(t2.kind(), series::SeriesKind::exponential);
}

TEST(LabelledSeries, MatchesPartitionEnumeration) {
  for (int d = 1; d <= 3; ++d) {
    const auto t = series::labelled_iterated_series(d, 7);
    for (int n = 1; n <= 7; ++n)
      EXPECT_EQ(t.count(static_cast<std::size_t>(n)), oracle::labelled_supertree_count(d, n)) << d << " " << n;
  }
}

TEST(PolyaSeries, Examples) {
  EXPECT_EQ(as_strings(series::polya_series(5)), (Strings{"0", "1", "1", "2", "4", "9"}));
  EXPECT_EQ(as_strings(series::polya_series(1)), (Strings{"0", "1"}));
  const auto p = series::polya_series(8);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(p[static_cast<std::size_t>(n)], oracle::polya_count(n));
}

TEST(PolyaSeries, RadiusEstimate) {
  const auto p = series::polya_series(400);
  const auto est = series::asymptotic_fit(p, {50, 400});
  EXPECT_NEAR(1.0 / est.base, 0.3383, 0.0005);
}

TEST(PlanarSupertrees, OrientedMatchesGenerator) {
  const auto k = series::planar_supertree_series(8, true);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(k[static_cast<std::size_t>(n)], oracle::planar_supertrees(n, true).size());
}

TEST(AsymptoticFit, CatalanNumbers) {
  const auto est = series::asymptotic_fit(series::f1_series(2000), {250, 2000});
  EXPECT_NEAR(est.base, 4.0, 1e-6);
  EXPECT_NEAR(est.exponent, -1.5, 0.005);
  EXPECT_NEAR(est.constant, 1.0 / std::sqrt(std::numbers::pi), 1e-3);
}

TEST(AsymptoticFit, KempSecondDimension) {
  series::AsymptoticFitOptions opt;
  opt.order = 4;
  opt.correction_step = 0.25;
  const auto est = series::asymptotic_fit(series::kemp_series(2, 2000), {250, 2000}, opt);
  EXPECT_NEAR(est.exponent, -1.25, 0.01);
  const double target = std::pow(2.0, 1.5) / std::abs(std::tgamma(-0.25));
  EXPECT_NEAR(target, 0.5770, 1e-4);
  EXPECT_NEAR(est.constant / target, 1.0, 0.02);
}

TEST(AsymptoticFit, SyntheticSeries) {
  // c_n = C 3^n n^a (1 + 0.3 / n), exact to double precision.
  const double C = 0.7, a = -1.5;
  const std::size_t N = 600;
  std::vector<mpq_class> c(N + 1, mpq_class(0));
  for (std::size_t n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    const double factor = C * std::pow(nd, a) * (1.0 + 0.3 / nd);
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, n);
    mpq_class q(mpz_class(std::ldexp(factor, 60)) * p, mpz_class(1) << 60);
    c[n] = q;
  }
  const CoeffSeries s(c, series::SeriesKind::ordinary, "synthetic");
  const auto est = series::asymptotic_fit(s, {60, N});
  EXPECT_NEAR(est.base, 3.0, 1e-8);
  EXPECT_NEAR(est.exponent, a, 1e-5);
  EXPECT_NEAR(est.constant, C, 1e-4);
}

TEST(AsymptoticFit, RejectsBadWindow) {
  const auto s = series::f1_series(100);
  EXPECT_THROW(series::asymptotic_fit(s, {0, 100}), precondition_error);
  EXPECT_THROW(series::asymptotic_fit(s, {10, 200}), precondition_error);
  EXPECT_THROW(series::asymptotic_fit(s, {10, 12}), precondition_error);
}

TEST(AsymptoticFit, ReportsNonconvergence) {
  // log-periodic wobble cannot be absorbed by power-law corrections
  const std::size_t N = 400;
  std::vector<mpq_class> c(N + 1, mpq_class(0));
  for (std::size_t n = 1; n <= N; ++n) {
    const double v = std::pow(static_cast<double>(n), -1.5) * (2.0 + std::sin(3.0 * std::log(static_cast<double>(n))));
    c[n] = mpq_class(mpz_class(std::ldexp(v, 60)), mpz_class(1) << 60) * (mpz_class(2) << n);
  }
  const CoeffSeries s(c, series::SeriesKind::ordinary, "wobble");
  EXPECT_THROW(series::asymptotic_fit(s, {20, N}), series::nonconvergence_error);
}

TEST(SeriesCsv, ExponentialCountsColumn) {
  std::ostringstream out;
  series::write_series_csv(out, series::labelled_iterated_series(2, 4));
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "n,numerator,denominator,count");
  EXPECT_NE(text.find("\n4,5,2,60\n"), std::string::npos);
}
