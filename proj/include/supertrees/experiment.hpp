#pragma once

// Seeded experiment runs. A Manifest names a subcommand and its parameters;
// run() dispatches it, writes CSV and JSON outputs into the manifest's
// output directory and returns the JSON summary. Replica i of a run always
// draws from make_stream(derived seed, i), so results do not depend on how
// many worker threads share the replicas.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "supertrees/asymptotics.hpp"
#include "supertrees/bgw.hpp"
#include "supertrees/error.hpp"
#include "supertrees/gibbs.hpp"
#include "supertrees/kemp_sampler.hpp"
#include "supertrees/limitspace.hpp"
#include "supertrees/pd.hpp"
#include "supertrees/random.hpp"
#include "supertrees/series.hpp"
#include "supertrees/stats.hpp"
#include "supertrees/tree.hpp"
#include "supertrees/tree_stats.hpp"

namespace supertrees::experiment {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Manifest {
  std::string subcommand;
  json parameters = json::object();
  std::optional<std::uint64_t> master_seed;
  unsigned worker_count = 1;
  std::string output_dir = ".";
  std::vector<std::string> outputs;  // filled in by run()

  /// The fields that determine the results: everything except the worker
  /// count and where the files go.
  json identity() const {
    json j;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["master_seed"] = master_seed ? json(*master_seed) : json(nullptr);
    j["version"] = kVersion;
    return j;
  }

  std::string hash() const {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(identity().dump());
    return s.str();
  }

  json to_json() const {
    json j = identity();
    j["worker_count"] = worker_count;
    j["output_dir"] = output_dir;
    j["outputs"] = outputs;
    j["manifest_hash"] = hash();
    return j;
  }

  template <class T>
  T param(const std::string& key, T fallback) const {
    return parameters.contains(key) && !parameters[key].is_null() ? parameters[key].get<T>() : fallback;
  }

  std::uint64_t seed() const {
    if (!master_seed) throw precondition_error("subcommand " + subcommand + " needs --seed");
    return *master_seed;
  }
};

/// Seed of the sub-run named `tag` within a run.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return splitmix64(master ^ fnv1a64(tag));
}

/// results[i] = task(i, rng_i) for i < count, spread over `workers` threads.
/// The first failing replica (by index) rethrows its exception.
template <class Task>
auto run_replicas(std::size_t count, unsigned workers, std::uint64_t seed, Task&& task) {
  using Result = decltype(task(std::size_t{0}, std::declval<Rng&>()));
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        Rng rng = make_stream(seed, i);
        slots[i].emplace(task(i, rng));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Writes the output files of one run; every file carries the manifest hash.
class OutputSet {
 public:
  explicit OutputSet(Manifest& m) : m_(m), dir_(m.output_dir) { std::filesystem::create_directories(dir_); }

  /// A CSV file whose first line is "# manifest <hash>".
  std::ofstream csv(const std::string& name) {
    std::ofstream out = open(name);
    out << "# manifest " << m_.hash() << '\n';
    return out;
  }

  void write_json(const std::string& name, json body) {
    body["manifest_hash"] = m_.hash();
    std::ofstream out = open(name);
    out << body.dump(2) << '\n';
  }

  void finish() {
    std::ofstream out(dir_ / "manifest.json");
    out << m_.to_json().dump(2) << '\n';
  }

 private:
  std::ofstream open(const std::string& name) {
    m_.outputs.push_back(name);
    std::ofstream out(dir_ / name);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << std::setprecision(17);
    return out;
  }

  Manifest& m_;
  std::filesystem::path dir_;
};

namespace impl {

inline series::CoeffSeries family_series(const std::string& family, int d, std::size_t N) {
  detail::require(N >= 1, "N must be at least 1");
  if (family == "kemp") return series::kemp_series(d, N);
  if (family == "labelled") return series::labelled_iterated_series(d, N);
  if (family == "polya") return series::polya_series(N);
  if (family == "plane") return series::plane_series(N);
  if (family == "K") return series::planar_supertree_series(N, false);
  if (family == "Ktilde") return series::planar_supertree_series(N, true);
  throw precondition_error("unknown family '" + family + "'");
}

inline std::size_t positive_size(const Manifest& m, const std::string& key, std::size_t fallback) {
  const long long v = m.param<long long>(key, static_cast<long long>(fallback));
  detail::require(v >= 1, key + " must be at least 1");
  return static_cast<std::size_t>(v);
}

inline int dimension(const Manifest& m, int fallback, int lowest) {
  const int d = m.param<int>("d", fallback);
  detail::require(d >= lowest, "d must be at least " + std::to_string(lowest));
  return d;
}

struct Expected {
  double base, exponent, constant;
};

// Known first-order asymptotics c_n ~ C b^n n^a of the families.
inline Expected expected_asymptotics(const std::string& family, int d) {
  const double pi = std::numbers::pi;
  if (family == "kemp") return {4.0, -1.0 - std::ldexp(1.0, -d), gibbs::kemp_constant(d)};
  if (family == "plane") return {4.0, -1.5, 1.0 / (4.0 * std::sqrt(pi))};
  if (family == "polya") return {1.0 / 0.3383218568992076, -1.5, 0.4399240125710253};
  if (family == "labelled" && d == 1) return {std::exp(1.0), -1.5, 1.0 / std::sqrt(2.0 * pi)};
  throw precondition_error("no reference asymptotics for family '" + family + "' with d = " + std::to_string(d));
}

inline json distance_summary(const std::vector<DistanceSample>& a, const std::vector<DistanceSample>& b) {
  return {{"ks", limit::two_sample_discrepancy(a, b, limit::Statistic::ks)},
          {"wasserstein1", limit::two_sample_discrepancy(a, b, limit::Statistic::wasserstein1)}};
}

}  // namespace impl

// ---------------------------------------------------------------------------
// Subcommands

inline json run_enumerate(Manifest& m) {
  const std::string family = m.param<std::string>("family", "kemp");
  const int d = impl::dimension(m, 1, 1);
  const long long N = m.param<long long>("N", 10);
  detail::require(N >= 1, "N must be at least 1");
  const auto s = impl::family_series(family, d, static_cast<std::size_t>(N));
  OutputSet out(m);
  {
    auto f = out.csv("series.csv");
    series::write_series_csv(f, s);
  }
  json summary = {{"family", family}, {"d", d}, {"N", N}, {"label", s.label()}};
  out.write_json("summary.json", summary);
  out.finish();
  return summary;
}

inline json run_verify_asymptotics(Manifest& m) {
  const std::string family = m.param<std::string>("family", "kemp");
  const int d = impl::dimension(m, 1, 1);
  const std::size_t N = impl::positive_size(m, "N", 2000);
  detail::require(N >= 64, "verify-asymptotics needs N >= 64");
  const auto s = impl::family_series(family, d, N);
  const auto expected = impl::expected_asymptotics(family, d);
  json summary = {{"family", family}, {"d", d}, {"N", N}};
  summary["expected"] = {{"base", expected.base}, {"exponent", expected.exponent}, {"constant", expected.constant}};
  series::AsymptoticEstimate est;
  bool converged = true;
  std::string note;
  // Kemp coefficients carry corrections in powers of n^(-2^-d) for d >= 2.
  series::AsymptoticFitOptions opt;
  if (family == "kemp" && d >= 2) {
    opt.order = 4;
    opt.correction_step = std::ldexp(1.0, -d);
  }
  summary["fit"] = {{"window", {N / 8, N}}, {"order", opt.order}, {"correction_step", opt.correction_step}};
  try {
    est = series::asymptotic_fit(s, {N / 8, N}, opt);
  } catch (const series::nonconvergence_error& e) {
    est = e.estimate();
    converged = false;
    note = e.what();
  }
  summary["estimate"] = {{"base", est.base},
                         {"exponent", est.exponent},
                         {"constant", est.constant},
                         {"exponent_spread", est.exponent_spread},
                         {"constant_spread", est.constant_spread},
                         {"monotone", est.monotone},
                         {"converged", converged}};
  if (!note.empty()) summary["estimate"]["note"] = note;
  summary["constant_relative_error"] = std::abs(est.constant / expected.constant - 1.0);
  summary["exponent_error"] = std::abs(est.exponent - expected.exponent);
  OutputSet out(m);
  {
    auto f = out.csv("diagnostics.csv");
    f << "upper,base,exponent,constant\n";
    for (const auto& p : est.diagnostics) f << p.upper << ',' << p.base << ',' << p.exponent << ',' << p.constant << '\n';
  }
  out.write_json("report.json", summary);
  out.finish();
  return summary;
}

inline json run_gibbs_law(Manifest& m) {
  const int d = impl::dimension(m, 2, 2);
  const std::size_t n = impl::positive_size(m, "n", 100);
  const auto law = gibbs::component_count_law(gibbs::kemp_scheme(d, n), n);
  OutputSet out(m);
  {
    auto f = out.csv("law.csv");
    gibbs::write_law_csv(f, law);
  }
  json summary = {{"d", d}, {"n", n}, {"u_n", law.u_n.get_str()}, {"mean", law.mean()}};
  out.write_json("summary.json", summary);
  out.finish();
  return summary;
}

inline json run_gibbs_llt(Manifest& m) {
  const int d = impl::dimension(m, 2, 2);
  const std::size_t n = impl::positive_size(m, "n", 800);
  const double delta = m.param<double>("delta", 0.1);
  detail::require(delta > 0.0, "delta must be positive");
  const auto params = gibbs::kemp_dilute_params(d);
  std::vector<std::size_t> sizes;
  for (std::size_t s = n; s >= 8 && sizes.size() < 4; s /= 2) sizes.insert(sizes.begin(), s);
  json rows = json::array();
  std::vector<double> values;
  for (std::size_t s : sizes) {
    const double v = gibbs::llt_discrepancy(gibbs::kemp_scheme(d, s), params, s, delta);
    values.push_back(v);
    rows.push_back({{"n", s}, {"discrepancy", v}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  json summary = {{"d", d}, {"n", n}, {"delta", delta}, {"discrepancies", rows}, {"strictly_decreasing", decreasing}};
  OutputSet out(m);
  {
    std::vector<double> xs;
    for (int i = 1; i <= 200; ++i) xs.push_back(0.02 * i);
    auto f = out.csv("ftilde.csv");
    gibbs::write_ftilde_csv(f, params, xs);
  }
  out.write_json("report.json", summary);
  out.finish();
  return summary;
}

inline json run_pd_sample(Manifest& m) {
  const double alpha = m.param<double>("alpha", 0.5);
  const double theta = m.param<double>("theta", -0.25);
  const std::size_t K = impl::positive_size(m, "K", 500);
  const std::size_t samples = impl::positive_size(m, "samples", 10000);
  pd::validate_pd(alpha, theta);
  const auto draws = run_replicas(samples, m.worker_count, derive_seed(m.seed(), "pd"),
                                  [&](std::size_t, Rng& rng) { return pd::sample_pd(alpha, theta, K, rng); });
  std::vector<double> sq, rem;
  OutputSet out(m);
  {
    auto f = out.csv("samples.csv");
    f << "replica,v1,v2,remainder,sum_sq\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& w = draws[i];
      sq.push_back(w.power_sum(2));
      rem.push_back(w.remainder);
      f << i << ',' << w.largest(0) << ',' << w.largest(1) << ',' << w.remainder << ',' << sq.back() << '\n';
    }
  }
  {
    auto f = out.csv("ranked_replica0.csv");
    pd::write_ranked_csv(f, draws.front());
  }
  json summary = {{"alpha", alpha}, {"theta", theta}, {"K", K}, {"samples", samples},
                  {"mean_sum_sq", stats::mean(sq)}, {"expected_sum_sq", pd::pair_probability(alpha, theta)},
                  {"mean_remainder", stats::mean(rem)}};
  if (samples >= 2) summary["se_sum_sq"] = stats::standard_error(sq);
  out.write_json("summary.json", summary);
  out.finish();
  return summary;
}

inline json run_pd_lemma(Manifest& m) {
  const double a1 = m.param<double>("a1", 0.5), a2 = m.param<double>("a2", 0.5), a3 = m.param<double>("a3", 0.5);
  const std::size_t K = impl::positive_size(m, "K", 100);
  const std::size_t samples = impl::positive_size(m, "samples", 10000);
  const double alpha = a1, theta = pd::theta_from_beta(a1, a2 * a3);
  struct Pair {
    pd::RankedWeights lemma, direct;
  };
  const auto draws = run_replicas(samples, m.worker_count, derive_seed(m.seed(), "pd-lemma"), [&](std::size_t, Rng& rng) {
    Pair p;
    p.lemma = pd::combine_products(a1, a2, a3, K, rng);
    p.direct = pd::sample_pd(alpha, theta, K, rng);
    return p;
  });
  std::vector<double> l1, d1, l2, d2, lsq;
  OutputSet out(m);
  {
    auto f = out.csv("largest.csv");
    f << "replica,lemma_v1,lemma_v2,direct_v1,direct_v2\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& p = draws[i];
      l1.push_back(p.lemma.largest(0));
      l2.push_back(p.lemma.largest(1));
      d1.push_back(p.direct.largest(0));
      d2.push_back(p.direct.largest(1));
      lsq.push_back(p.lemma.power_sum(2));
      f << i << ',' << l1.back() << ',' << l2.back() << ',' << d1.back() << ',' << d2.back() << '\n';
    }
  }
  json summary = {{"a1", a1}, {"a2", a2}, {"a3", a3}, {"K", K}, {"samples", samples},
                  {"alpha", alpha}, {"theta", theta},
                  {"mean_sum_sq", stats::mean(lsq)}, {"expected_sum_sq", pd::pair_probability(alpha, theta)},
                  {"ks_largest", stats::ks_statistic(l1, d1)}, {"ks_second", stats::ks_statistic(l2, d2)}};
  if (samples >= 2) summary["se_sum_sq"] = stats::standard_error(lsq);
  out.write_json("summary.json", summary);
  out.finish();
  return summary;
}

inline json run_sample_tree(Manifest& m) {
  const std::string family = m.param<std::string>("family", "kemp");
  const std::size_t n = impl::positive_size(m, "n", 100);
  const std::size_t samples = impl::positive_size(m, "samples", 10);
  struct Row {
    std::string code;
    trees::MetricStats metric;
    std::size_t first_level = 0, largest = 0;
  };
  std::vector<Row> rows;
  int d = 1;
  if (family == "kemp") {
    d = impl::dimension(m, 2, 1);
    const trees::KempTables tables(d, n);
    detail::require(sgn(tables.count(d, n)) > 0, "no Kemp tree of this size and dimension");
    rows = run_replicas(samples, m.worker_count, derive_seed(m.seed(), "tree"), [&](std::size_t, Rng& rng) {
      const auto t = trees::sample_uniform_kemp(tables, d, n, rng);
      Row r{trees::serialize(t), trees::metric_stats(t), trees::level_component_sizes(t, 1)[0], 0};
      if (d >= 2) {
        const auto c = trees::level_component_sizes(t, 2);
        r.largest = c.empty() ? 0 : c[0];
      }
      return r;
    });
  } else if (family == "bgw") {
    const double a = m.param<double>("a", 2.0);
    const auto law = a == 2.0 ? trees::OffspringLaw::geometric() : trees::OffspringLaw::power_law(a);
    rows = run_replicas(samples, m.worker_count, derive_seed(m.seed(), "tree"), [&](std::size_t, Rng& rng) {
      const auto t = trees::sample_conditioned_bgw(law, n, rng);
      return Row{trees::serialize(t), trees::metric_stats(t), t.size(), 0};
    });
  } else {
    throw precondition_error("sample-tree supports the families kemp and bgw");
  }
  OutputSet out(m);
  {
    auto f = out.csv("stats.csv");
    f << "replica,n,first_level,largest_component,height,diameter,first_level_diameter\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      f << i << ',' << n << ',' << rows[i].first_level << ',' << rows[i].largest << ',' << rows[i].metric.height << ','
        << rows[i].metric.diameter << ',' << rows[i].metric.first_level_diameter << '\n';
  }
  {
    std::ofstream f = out.csv("trees.txt");
    for (const auto& r : rows) f << r.code << '\n';
  }
  json summary = {{"family", family}, {"d", d}, {"n", n}, {"samples", samples}};
  out.write_json("summary.json", summary);
  out.finish();
  return summary;
}

// ---------------------------------------------------------------------------
// Local limits

struct LocalLimitOptions {
  int d = 2;
  std::size_t n = 2000;
  std::size_t samples = 10000;
  int radius = 2;
  int spine_depth = 4;
  int quench_radius = 1;
  unsigned workers = 1;
  double tv_threshold = 0.05;
  double quench_threshold = 0.07;
};

struct LocalLimitResult {
  stats::Counts root_tree, root_spine, vertex_d, vertex_1, vertex_1_reference;
  std::vector<std::pair<std::string, std::string>> quench_pairs;
  std::size_t spine_cap_hits = 0;
  json report;
};

inline LocalLimitResult local_limit(const LocalLimitOptions& o, std::uint64_t seed) {
  detail::require(o.d >= 2, "local limits compare d >= 2 with d = 1");
  detail::require(o.radius >= 0 && o.spine_depth >= o.radius, "spine depth must be at least the radius");
  const trees::KempTables td(o.d, o.n), t1(1, o.n);
  detail::require(sgn(td.count(o.d, o.n)) > 0, "no Kemp tree of this size and dimension");
  using trees::LevelTags;
  struct Row {
    std::string root_tree, root_spine, vertex_d, vertex_1, vertex_1b, q1, q2;
    std::size_t cap_hits = 0;
  };
  const auto rows = run_replicas(o.samples, o.workers, seed, [&](std::size_t, Rng& rng) {
    Row r;
    const auto a = trees::sample_uniform_kemp(td, o.d, o.n, rng);
    r.root_tree = trees::ball_encode(a, 0, o.radius);
    r.vertex_d = trees::ball_encode(a, static_cast<int>(uniform_index(rng, a.size())), o.radius, LevelTags::relative);
    const int x = static_cast<int>(uniform_index(rng, a.size()));
    const int y = static_cast<int>(uniform_index(rng, a.size()));
    r.q1 = trees::ball_encode(a, x, o.quench_radius, LevelTags::relative);
    r.q2 = trees::ball_encode(a, y, o.quench_radius, LevelTags::relative);
    std::optional<trees::SuperTree> s;
    while (!(s = trees::sample_spine_truncated(o.d, o.spine_depth, rng))) ++r.cap_hits;
    r.root_spine = trees::ball_encode(*s, 0, o.radius);
    const auto b = trees::sample_uniform_kemp(t1, 1, o.n, rng);
    r.vertex_1 = trees::ball_encode(b, static_cast<int>(uniform_index(rng, b.size())), o.radius, LevelTags::relative);
    const auto c = trees::sample_uniform_kemp(t1, 1, o.n, rng);
    r.vertex_1b = trees::ball_encode(c, static_cast<int>(uniform_index(rng, c.size())), o.radius, LevelTags::relative);
    return r;
  });
  LocalLimitResult res;
  for (const auto& r : rows) {
    res.root_tree[r.root_tree] += 1;
    res.root_spine[r.root_spine] += 1;
    res.vertex_d[r.vertex_d] += 1;
    res.vertex_1[r.vertex_1] += 1;
    res.vertex_1_reference[r.vertex_1b] += 1;
    res.quench_pairs.emplace_back(r.q1, r.q2);
    res.spine_cap_hits += r.cap_hits;
  }
  const double tv_root = stats::total_variation(res.root_tree, res.root_spine);
  const double tv_vertex = stats::total_variation(res.vertex_d, res.vertex_1);
  const double tv_reference = stats::total_variation(res.vertex_1, res.vertex_1_reference);
  const double tv_quench = stats::independence_tv(res.quench_pairs);
  res.report = {
      {"d", o.d}, {"n", o.n}, {"samples", o.samples}, {"radius", o.radius}, {"spine_depth", o.spine_depth},
      {"quench_radius", o.quench_radius},
      {"root_ball", {{"tv", tv_root}, {"threshold", o.tv_threshold}, {"pass", tv_root < o.tv_threshold},
                     {"categories_tree", res.root_tree.size()}, {"categories_spine", res.root_spine.size()},
                     {"spine_cap_exceeded", res.spine_cap_hits}}},
      {"random_vertex_ball", {{"tv", tv_vertex}, {"threshold", o.tv_threshold}, {"pass", tv_vertex < o.tv_threshold},
                              {"same_law_reference_tv", tv_reference},
                              {"categories_d", res.vertex_d.size()}, {"categories_1", res.vertex_1.size()}}},
      {"quenched", {{"tv", tv_quench}, {"threshold", o.quench_threshold}, {"pass", tv_quench < o.quench_threshold}}}};
  return res;
}

namespace impl {

inline void write_corpus(std::ofstream& f, const stats::Counts& a, const stats::Counts& b, const char* na,
                         const char* nb) {
  f << "code," << na << ',' << nb << '\n';
  std::map<std::string, std::pair<double, double>> all;
  for (const auto& [k, c] : a) all[k].first = c;
  for (const auto& [k, c] : b) all[k].second = c;
  for (const auto& [k, c] : all) f << k << ',' << c.first << ',' << c.second << '\n';
}

}  // namespace impl

inline json run_local_limit(Manifest& m) {
  LocalLimitOptions o;
  o.d = impl::dimension(m, 2, 2);
  o.n = impl::positive_size(m, "n", 2000);
  o.samples = impl::positive_size(m, "samples", 10000);
  o.radius = m.param<int>("radius", 2);
  o.spine_depth = m.param<int>("spine_depth", o.radius + 2);
  o.quench_radius = m.param<int>("quench_radius", 1);
  o.workers = m.worker_count;
  const auto res = local_limit(o, derive_seed(m.seed(), "local-limit"));
  OutputSet out(m);
  {
    auto f = out.csv("root_balls.csv");
    impl::write_corpus(f, res.root_tree, res.root_spine, "count_tree", "count_spine");
  }
  {
    auto f = out.csv("vertex_balls.csv");
    impl::write_corpus(f, res.vertex_d, res.vertex_1, "count_d", "count_1");
  }
  out.write_json("report.json", res.report);
  out.finish();
  return res.report;
}

// ---------------------------------------------------------------------------
// Scaling limits

struct ScalingOptions {
  int d = 2;
  std::size_t n = 2000;
  std::size_t samples = 10000;
  std::size_t K = 500;                // PD truncation for the glued space
  std::size_t base_resolution = 4000;  // m of the Brownian proxy
  unsigned workers = 1;
  double component_threshold = 0.05;
  double distance_threshold = 0.07;
};

struct ScalingResult {
  std::vector<DistanceSample> tree2, tree3;
  std::vector<limit::GluedSample> glued2, glued3;
  json report;
};

inline ScalingResult scaling(const ScalingOptions& o, std::uint64_t seed) {
  detail::require(o.d >= 2, "the scaling experiment needs d >= 2");
  const trees::KempTables tables(o.d, o.n);
  detail::require(sgn(tables.count(o.d, o.n)) > 0, "no Kemp tree of this size and dimension");
  json warnings = json::array();
  if (o.n < 64) warnings.push_back("degenerate size: n = " + std::to_string(o.n) + " is far from the limit");

  const double alpha = std::ldexp(1.0, -(o.d - 1));
  const double theta = pd::theta_from_beta(alpha, 0.5);
  const double scale = std::pow(2.0, -1.5) / std::sqrt(static_cast<double>(o.n));
  limit::GlueSpec spec;
  spec.alpha = 0.5;
  spec.theta = -std::ldexp(1.0, -o.d);
  spec.s = 0.5;
  spec.K = o.K;
  spec.base_law = limit::BrownianProxy(o.base_resolution).law();

  std::vector<std::size_t> trend_sizes;
  for (std::size_t s : {o.n / 4, o.n / 2, o.n})
    if (s >= 1 && sgn(tables.count(o.d, s)) > 0) trend_sizes.push_back(s);
  if (trend_sizes.size() < 3) warnings.push_back("contraction trend uses fewer than three sizes");

  struct Row {
    double k1 = 0, k2 = 0, v1 = 0, v2 = 0, remainder = 0;
    DistanceSample t2, t3;
    limit::GluedSample g2, g3;
    std::vector<trees::MetricStats> metric;
  };
  const auto rows = run_replicas(o.samples, o.workers, seed, [&](std::size_t, Rng& rng) {
    Row r;
    const auto t = trees::sample_uniform_kemp(tables, o.d, o.n, rng);
    const auto depth = trees::depths(t);
    const auto comps = trees::level_component_sizes(t, 2);
    r.k1 = comps.size() > 0 ? static_cast<double>(comps[0]) / o.n : 0.0;
    r.k2 = comps.size() > 1 ? static_cast<double>(comps[1]) / o.n : 0.0;
    if (o.n >= 3) {
      r.t2 = trees::distance_matrix_sample(t, depth, 2, scale, rng);
      r.t3 = trees::distance_matrix_sample(t, depth, 3, scale, rng);
    }
    const auto w = pd::sample_pd(alpha, theta, o.K, rng);
    r.v1 = w.largest(0);
    r.v2 = w.largest(1);
    r.g2 = limit::sample_glued_distances(spec, 2, rng);
    r.g3 = limit::sample_glued_distances(spec, 3, rng);
    r.remainder = r.g3.atom_mass;
    for (std::size_t s : trend_sizes)
      r.metric.push_back(s == o.n ? trees::metric_stats(t) : trees::metric_stats(trees::sample_uniform_kemp(tables, o.d, s, rng)));
    return r;
  });

  ScalingResult res;
  std::vector<double> k1, k2, v1, v2, rem;
  std::vector<std::vector<double>> fld(trend_sizes.size()), diam(trend_sizes.size());
  for (const auto& r : rows) {
    k1.push_back(r.k1);
    k2.push_back(r.k2);
    v1.push_back(r.v1);
    v2.push_back(r.v2);
    rem.push_back(r.remainder);
    if (o.n >= 3) {
      res.tree2.push_back(r.t2);
      res.tree3.push_back(r.t3);
    }
    res.glued2.push_back(r.g2);
    res.glued3.push_back(r.g3);
    for (std::size_t j = 0; j < trend_sizes.size(); ++j) {
      const double s = static_cast<double>(trend_sizes[j]);
      fld[j].push_back(r.metric[j].first_level_diameter / std::pow(s, 0.25));
      diam[j].push_back(r.metric[j].diameter / std::sqrt(s));
    }
  }

  json report = {{"d", o.d}, {"n", o.n}, {"samples", o.samples}, {"K", o.K},
                 {"base_resolution", o.base_resolution}, {"warnings", warnings}};
  const double ks1 = stats::ks_statistic(k1, v1), ks2 = stats::ks_statistic(k2, v2);
  report["components"] = {{"pd_alpha", alpha}, {"pd_theta", theta}, {"ks_largest", ks1}, {"ks_second", ks2},
                          {"threshold", o.component_threshold},
                          {"pass", ks1 < o.component_threshold && ks2 < o.component_threshold}};

  json trend = json::array();
  std::vector<double> med_fld, med_diam;
  for (std::size_t j = 0; j < trend_sizes.size(); ++j) {
    med_fld.push_back(stats::median(fld[j]));
    med_diam.push_back(stats::median(diam[j]));
    trend.push_back({{"n", trend_sizes[j]}, {"median_first_level_diameter_over_n_quarter", med_fld.back()},
                     {"median_diameter_over_sqrt_n", med_diam.back()}});
  }
  bool contraction_pass = false;
  double fld_spread = 0.0, diam_ratio = 0.0;
  if (!med_fld.empty() && *std::min_element(med_fld.begin(), med_fld.end()) > 0.0) {
    fld_spread = *std::max_element(med_fld.begin(), med_fld.end()) / *std::min_element(med_fld.begin(), med_fld.end());
    diam_ratio = med_diam.front() > 0.0 ? med_diam.back() / med_diam.front() : 0.0;
    contraction_pass = trend_sizes.size() == 3 && fld_spread <= 1.5 && diam_ratio >= 0.75;
  }
  report["contraction"] = {{"sizes", trend}, {"first_level_spread", fld_spread}, {"first_level_spread_limit", 1.5},
                           {"diameter_ratio", diam_ratio}, {"diameter_ratio_floor", 0.75}, {"pass", contraction_pass}};

  if (o.n >= 3) {
    const json k2s = impl::distance_summary(res.tree2, std::vector<DistanceSample>(res.glued2.begin(), res.glued2.end()));
    const json k3s = impl::distance_summary(res.tree3, std::vector<DistanceSample>(res.glued3.begin(), res.glued3.end()));
    const bool pass = k2s["ks"].get<double>() < o.distance_threshold && k3s["ks"].get<double>() < o.distance_threshold;
    report["distances"] = {{"k2", k2s}, {"k3", k3s}, {"threshold", o.distance_threshold},
                           {"mean_root_atom_mass", stats::mean(rem)}, {"pass", pass}};
  } else {
    report["distances"] = {{"pass", false}, {"note", "n too small for distance samples"}};
  }
  report["pass"] = report["components"]["pass"].get<bool>() && report["contraction"]["pass"].get<bool>() &&
                   report["distances"]["pass"].get<bool>();
  res.report = report;
  return res;
}

inline json run_scaling_experiment(Manifest& m) {
  ScalingOptions o;
  o.d = impl::dimension(m, 2, 2);
  o.n = impl::positive_size(m, "n", 2000);
  o.samples = impl::positive_size(m, "samples", 10000);
  o.K = impl::positive_size(m, "K", 500);
  o.base_resolution = impl::positive_size(m, "m", 4000);
  detail::require(o.base_resolution >= 2, "m must be at least 2");
  o.workers = m.worker_count;
  const auto res = scaling(o, derive_seed(m.seed(), "scaling"));
  OutputSet out(m);
  if (!res.tree3.empty()) {
    auto f = out.csv("tree_distances.csv");
    limit::write_ensemble_csv(f, res.tree3);
  }
  {
    auto f = out.csv("glued_distances.csv");
    limit::write_ensemble_csv(f, res.glued3);
  }
  out.write_json("report.json", res.report);
  out.finish();
  return res.report;
}

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"enumerate", "verify-asymptotics", "gibbs-law", "gibbs-llt",
                                                 "pd-sample", "pd-lemma", "sample-tree", "local-limit",
                                                 "scaling-experiment"};
  return names;
}

inline bool needs_seed(const std::string& subcommand) {
  return subcommand == "pd-sample" || subcommand == "pd-lemma" || subcommand == "sample-tree" ||
         subcommand == "local-limit" || subcommand == "scaling-experiment";
}

inline json run(Manifest& m) {
  detail::require(m.worker_count >= 1, "worker count must be at least 1");
  if (needs_seed(m.subcommand)) m.seed();
  if (m.subcommand == "enumerate") return run_enumerate(m);
  if (m.subcommand == "verify-asymptotics") return run_verify_asymptotics(m);
  if (m.subcommand == "gibbs-law") return run_gibbs_law(m);
  if (m.subcommand == "gibbs-llt") return run_gibbs_llt(m);
  if (m.subcommand == "pd-sample") return run_pd_sample(m);
  if (m.subcommand == "pd-lemma") return run_pd_lemma(m);
  if (m.subcommand == "sample-tree") return run_sample_tree(m);
  if (m.subcommand == "local-limit") return run_local_limit(m);
  if (m.subcommand == "scaling-experiment") return run_scaling_experiment(m);
  throw precondition_error("unknown subcommand '" + m.subcommand + "'");
}

}  // namespace supertrees::experiment
