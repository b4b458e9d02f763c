// Acceptance suite. Each criterion is one test; the binary prints one
// "criterion N: PASS|FAIL ..." line per selected criterion.
//
//   acceptance [--criterion N]... [--report-only]
//
// Without --report-only the exit status is nonzero when a criterion fails.
// With it, the status only reflects whether every criterion was evaluated.

#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles/enumeration.hpp"
#include "support/cli_runs.hpp"
#include "supertrees/asymptotics.hpp"
#include "supertrees/experiment.hpp"
#include "supertrees/gibbs.hpp"
#include "supertrees/kemp_sampler.hpp"
#include "supertrees/pd.hpp"
#include "supertrees/series.hpp"
#include "supertrees/stable.hpp"
#include "supertrees/stats.hpp"
#include "supertrees/tree.hpp"

using namespace supertrees;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::map<int, Verdict>& verdicts() {
  static std::map<int, Verdict> v;
  return v;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Builds the detail text of one criterion.
class Detail {
 public:
  template <class T>
  Detail& add(const std::string& key, const T& value) {
    if (!text_.str().empty()) text_ << ' ';
    text_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_{std::ios::out};
};

void record(int criterion, bool pass, const Detail& detail) {
  verdicts()[criterion] = {pass, detail.str()};
  EXPECT_TRUE(pass) << "criterion " << criterion << ": " << detail.str();
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

const char* yes(bool b) { return b ? "yes" : "no"; }

double rho1_moment(double alpha, double beta, double p) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  // 1 - x comes from the endpoint distance near 1, where rho_1 is singular
  const double log_m1 = std::log(pd::poisson_factorial_moment(alpha, beta, 1));
  auto f = [&](double x, double xc) {
    if (x <= 0.0 || (x > 0.5 && xc <= 0.0)) return 0.0;
    const double log_rest = x > 0.5 ? std::log(xc) : std::log1p(-x);
    return std::exp(log_m1 + (p - alpha - 1.0) * std::log(x) + (alpha * (1.0 - beta) - 1.0) * log_rest);
  };
  return integrator.integrate(f, 0.0, 1.0, 1e-13);
}

}  // namespace

TEST(Acceptance, Criterion01ExactEnumeration) {
  const Clock clock;
  constexpr int N = 8;
  int checked = 0, mismatches = 0;
  auto check = [&](bool ok) {
    ++checked;
    if (!ok) ++mismatches;
  };
  for (int d = 1; d <= 3; ++d) {
    const auto s = series::kemp_series(d, N);
    for (int n = 1; n <= N; ++n) check(s[static_cast<std::size_t>(n)] == oracle::kemp_trees(d, n).size());
  }
  const auto cayley = series::labelled_iterated_series(1, N);
  for (int n = 1; n <= N; ++n) {
    check(cayley.count(static_cast<std::size_t>(n)) == oracle::rooted_labelled_count(n));
    check(cayley.count(static_cast<std::size_t>(n)) == oracle::labelled_supertree_count(1, n));
  }
  const auto t2 = series::labelled_iterated_series(2, N);
  for (int n = 1; n <= N; ++n) check(t2.count(static_cast<std::size_t>(n)) == oracle::labelled_supertree_count(2, n));
  const auto polya = series::polya_series(N);
  for (int n = 1; n <= N; ++n) check(polya[static_cast<std::size_t>(n)] == oracle::polya_count(n));
  for (bool oriented : {false, true}) {
    const auto k = series::planar_supertree_series(N, oriented);
    for (int n = 1; n <= N; ++n) check(k[static_cast<std::size_t>(n)] == oracle::planar_supertrees(n, oriented).size());
  }
  const double t = clock.seconds();
  record(1, mismatches == 0 && t < 60.0,
         Detail().add("coefficients", checked).add("mismatches", mismatches).add("seconds", t));
}

TEST(Acceptance, Criterion02AsymptoticRecovery) {
  const Clock clock;
  constexpr std::size_t N = 2000;
  series::AsymptoticFitOptions opt;
  opt.order = 4;
  opt.correction_step = 0.25;
  const auto e2 = series::asymptotic_fit(series::kemp_series(2, N), {N / 8, N}, opt);
  const auto e1 = series::asymptotic_fit(series::f1_series(N), {N / 8, N});
  const double c2 = std::pow(2.0, 1.5) / std::abs(std::tgamma(-0.25));
  const double c1 = 1.0 / std::sqrt(std::numbers::pi);
  const double err2 = std::abs(e2.constant / c2 - 1.0), err1 = std::abs(e1.constant / c1 - 1.0);
  const double t = clock.seconds();
  const bool pass = std::abs(e2.exponent + 1.25) <= 0.01 && err2 <= 0.02 && err1 <= 0.01 && t < 300.0;
  record(2, pass,
         Detail()
             .add("exponent_d2", e2.exponent)
             .add("constant_d2", e2.constant)
             .add("rel_err_d2", err2)
             .add("constant_d1", e1.constant)
             .add("rel_err_d1", err1)
             .add("seconds", t));
}

TEST(Acceptance, Criterion03ClosedFormChain) {
  const double chain =
      gibbs::stable_fractional_moment(0.5, 0.5, 1.0 / std::sqrt(std::numbers::pi)) / std::sqrt(std::numbers::pi);
  const double closed = std::pow(2.0, 1.5) / std::abs(std::tgamma(-0.25));
  // 0.57703 is the five-digit rounding of the closed form; the 1e-6 check is
  // against the closed form itself.
  const bool rounds = std::round(chain * 1e5) == 57703.0;
  const bool pass = rounds && std::abs(chain - closed) < 1e-6;
  record(3, pass,
         Detail()
             .add("chain", std::to_string(chain))
             .add("closed_form", std::to_string(closed))
             .add("difference", std::abs(chain - closed))
             .add("rounds_to_0.57703", yes(rounds)));
}

TEST(Acceptance, Criterion04LocalLimitTheorem) {
  const Clock clock;
  const auto params = gibbs::kemp_dilute_params(2);
  std::vector<double> values;
  Detail detail;
  for (std::size_t n : {100, 200, 400, 800}) {
    values.push_back(gibbs::llt_discrepancy(gibbs::kemp_scheme(2, n), params, n, 0.1));
    detail.add("n" + std::to_string(n), values.back());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  const double t = clock.seconds();
  detail.add("strictly_decreasing", yes(decreasing)).add("seconds", t);
  record(4, decreasing && values.back() < 0.1 && t < 600.0, detail);
}

TEST(Acceptance, Criterion05PdIdentities) {
  Detail detail;
  bool pass = true;
  std::uint64_t seed = 501;
  for (auto [alpha, theta] : {std::pair{0.5, -0.25}, std::pair{0.5, -0.125}}) {
    const double beta = -theta / alpha;
    const double target = pd::pair_probability(alpha, theta);
    Rng rng(seed++);
    std::vector<double> s2;
    for (int i = 0; i < 100000; ++i) s2.push_back(pd::sample_pd(alpha, theta, 500, rng).power_sum(2.0));
    const double mean = stats::mean(s2), se = stats::standard_error(s2);
    const double q1 = rho1_moment(alpha, beta, 1.0), q2 = rho1_moment(alpha, beta, 2.0);
    pass = pass && std::abs(mean - target) <= 3.0 * se && std::abs(q1 - 1.0) <= 1e-8 && std::abs(q2 - target) <= 1e-8;
    const std::string tag = "theta" + std::to_string(theta).substr(0, 6);
    detail.add(tag + "_mc", mean)
        .add(tag + "_target", target)
        .add(tag + "_z", (mean - target) / se)
        .add(tag + "_quad1_err", std::abs(q1 - 1.0))
        .add(tag + "_quad2_err", std::abs(q2 - target));
  }
  record(5, pass, detail);
}

TEST(Acceptance, Criterion06ConcatenationLemma) {
  Rng rng(601);
  constexpr int draws = 10000;
  std::vector<double> s2, c1, d1;
  for (int i = 0; i < draws; ++i) {
    const auto c = pd::combine_products(0.5, 0.5, 0.5, 100, rng);
    const auto d = pd::sample_pd(0.5, -0.125, 500, rng);
    s2.push_back(c.power_sum(2.0));
    c1.push_back(c.largest(0));
    d1.push_back(d.largest(0));
  }
  const double mean = stats::mean(s2), se = stats::standard_error(s2);
  const double ks = stats::ks_statistic(c1, d1);
  record(6, std::abs(mean - 4.0 / 7.0) <= 3.0 * se && ks < 0.05,
         Detail().add("second_moment", mean).add("z", (mean - 4.0 / 7.0) / se).add("ks_largest", ks));
}

TEST(Acceptance, Criterion07ScalingProxies) {
  const Clock clock;
  experiment::ScalingOptions o;
  o.d = 2;
  o.n = 2000;
  o.samples = 10000;
  o.workers = worker_count();
  const auto res = experiment::scaling(o, experiment::derive_seed(701, "scaling"));
  const auto& r = res.report;
  const double t = clock.seconds();
  const bool a = r["components"]["pass"], b = r["contraction"]["pass"], c = r["distances"]["pass"];
  record(7, a && b && c && t < 1800.0,
         Detail()
             .add("a_ks_largest", r["components"]["ks_largest"].get<double>())
             .add("a_ks_second", r["components"]["ks_second"].get<double>())
             .add("a", a ? "pass" : "fail")
             .add("b_first_level_spread", r["contraction"]["first_level_spread"].get<double>())
             .add("b_diameter_ratio", r["contraction"]["diameter_ratio"].get<double>())
             .add("b", b ? "pass" : "fail")
             .add("c_ks_k2", r["distances"]["k2"]["ks"].get<double>())
             .add("c_ks_k3", r["distances"]["k3"]["ks"].get<double>())
             .add("c", c ? "pass" : "fail")
             .add("seconds", t));
}

TEST(Acceptance, Criterion08LocalLimitProxies) {
  experiment::LocalLimitOptions o;
  o.d = 2;
  o.n = 2000;
  o.samples = 10000;
  o.radius = 2;
  o.workers = worker_count();
  const auto res = experiment::local_limit(o, experiment::derive_seed(801, "local-limit"));
  const auto& r = res.report;
  const bool root = r["root_ball"]["pass"], vertex = r["random_vertex_ball"]["pass"], quench = r["quenched"]["pass"];
  record(8, root && vertex && quench,
         Detail()
             .add("root_ball_tv", r["root_ball"]["tv"].get<double>())
             .add("random_vertex_tv", r["random_vertex_ball"]["tv"].get<double>())
             .add("same_law_reference_tv", r["random_vertex_ball"]["same_law_reference_tv"].get<double>())
             .add("quenched_tv", r["quenched"]["tv"].get<double>()));
}

TEST(Acceptance, Criterion09SamplerUniformity) {
  // Every (d, n) with f_{d,n} <= 50 for d <= 8.
  constexpr int max_d = 8;
  constexpr int draws = 100000;
  int cases = 0, failures = 0;
  double min_p = 1.0;
  Detail detail;
  for (int d = 1; d <= max_d; ++d) {
    const trees::KempTables tables(d, static_cast<std::size_t>(d) + 8);
    Rng rng(900 + static_cast<std::uint64_t>(d));
    for (std::size_t n = 1; n <= tables.order(); ++n) {
      const mpz_class& f = tables.count(d, n);
      if (sgn(f) == 0 || f > 50) continue;
      const auto codes = oracle::kemp_trees(d, static_cast<int>(n));
      std::map<std::string, double> counts;
      for (int i = 0; i < draws; ++i) counts[trees::serialize(trees::sample_uniform_kemp(tables, d, n, rng))] += 1.0;
      std::vector<double> obs, prob;
      double seen = 0.0;
      for (const auto& c : codes) {
        obs.push_back(counts.count(c) ? counts[c] : 0.0);
        prob.push_back(1.0 / static_cast<double>(codes.size()));
        seen += obs.back();
      }
      const bool inside = seen == draws && codes.size() == f.get_ui();
      const double p = codes.size() > 1 ? stats::chi_square(obs, prob).p_value : 1.0;
      const bool ok = inside && p >= 0.01;
      ++cases;
      if (!ok) {
        ++failures;
        detail.add("failed_d" + std::to_string(d) + "_n" + std::to_string(n), p);
      }
      min_p = std::min(min_p, p);
    }
  }
  detail.add("cases", cases).add("failures", failures).add("min_p", min_p);
  record(9, failures == 0, detail);
}

TEST(Acceptance, Criterion10Determinism) {
  namespace fs = std::filesystem;
  const fs::path root = support::scratch("acceptance-determinism");
  int runs = 0, differing = 0, errors = 0;
  Detail detail;
  for (const auto& r : support::small_runs()) {
    std::vector<std::map<std::string, std::string>> snaps;
    for (const char* workers : {"1", "3", "1"}) {
      const fs::path dir = root / (r.subcommand + "-" + std::to_string(snaps.size()));
      const int code =
          support::run_cli(r.subcommand + " " + r.args + " --workers " + workers + " --out " + dir.string(), root / "log");
      ++runs;
      if (code != 0) {
        ++errors;
        break;
      }
      snaps.push_back(support::snapshot(dir));
    }
    if (snaps.size() == 3 && (snaps[0] != snaps[1] || snaps[0] != snaps[2])) {
      ++differing;
      detail.add("differs", r.subcommand);
    }
  }
  detail.add("subcommands", support::small_runs().size()).add("runs", runs).add("errors", errors).add("differing", differing);
  record(10, errors == 0 && differing == 0, detail);
}

int main(int argc, char** argv) {
  std::vector<int> selected;
  bool report_only = false;
  std::vector<char*> rest{argv[0]};
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--report-only") == 0) {
      report_only = true;
    } else {
      rest.push_back(argv[i]);
    }
  }
  for (int c : selected) {
    if (c < 1 || c > 10) {
      std::cerr << "criterion must be between 1 and 10\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int c = 1; c <= 10; ++c) selected.push_back(c);
  std::string filter;
  for (int c : selected) {
    std::ostringstream name;
    name << "Acceptance.Criterion" << std::setw(2) << std::setfill('0') << c << "*";
    filter += (filter.empty() ? "" : ":") + name.str();
  }
  int gargc = static_cast<int>(rest.size());
  ::testing::InitGoogleTest(&gargc, rest.data());
  ::testing::GTEST_FLAG(filter) = filter;
  const int status = RUN_ALL_TESTS();

  bool all_evaluated = true;
  std::cout << std::setprecision(6);
  for (int c : selected) {
    const auto it = verdicts().find(c);
    if (it == verdicts().end()) {
      all_evaluated = false;
      std::cout << "criterion " << c << ": FAIL (not evaluated)\n";
    } else {
      std::cout << "criterion " << c << ": " << (it->second.pass ? "PASS" : "FAIL") << "  " << it->second.detail << '\n';
    }
  }
  if (report_only) return all_evaluated ? 0 : 1;
  return status;
}
