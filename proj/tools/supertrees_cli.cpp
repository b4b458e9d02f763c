// Command-line driver: every subcommand fills a Manifest from its flags and
// hands it to experiment::run.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "supertrees/experiment.hpp"

namespace {

using supertrees::experiment::json;
using supertrees::experiment::Manifest;

struct Flags {
  std::optional<std::string> family;
  std::optional<int> d;
  std::optional<long long> n, N, K, samples, m;
  std::optional<double> alpha, theta, s, delta, a, a1, a2, a3;
  std::optional<int> radius, spine_depth, quench_radius;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--family", f.family, "tree or series family");
  sub->add_option("--d", f.d, "dimension");
  sub->add_option("--n", f.n, "tree size");
  sub->add_option("--N", f.N, "series truncation order");
  sub->add_option("--alpha", f.alpha, "PD alpha");
  sub->add_option("--theta", f.theta, "PD theta");
  sub->add_option("--s", f.s, "metric exponent");
  sub->add_option("--K", f.K, "PD truncation");
  sub->add_option("--delta", f.delta, "LLT threshold");
  sub->add_option("--samples", f.samples, "number of replicas");
  sub->add_option("--m", f.m, "base-law resolution");
  sub->add_option("--a", f.a, "stable index of BGW offspring");
  sub->add_option("--a1", f.a1, "lemma parameter 1");
  sub->add_option("--a2", f.a2, "lemma parameter 2");
  sub->add_option("--a3", f.a3, "lemma parameter 3");
  sub->add_option("--radius", f.radius, "ball radius");
  sub->add_option("--spine-depth", f.spine_depth, "depth of the truncated spine tree");
  sub->add_option("--quench-radius", f.quench_radius, "ball radius of the quenched check");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory (default: $SUPERTREES_OUTPUT_DIR/<subcommand>, else ./supertrees-out/<subcommand>)");
}

template <class T>
void put(json& p, const char* key, const std::optional<T>& v) {
  if (v) p[key] = *v;
}

Manifest manifest_from(const std::string& name, const Flags& f) {
  Manifest m;
  m.subcommand = name;
  json& p = m.parameters;
  put(p, "family", f.family);
  put(p, "d", f.d);
  put(p, "n", f.n);
  put(p, "N", f.N);
  put(p, "alpha", f.alpha);
  put(p, "theta", f.theta);
  put(p, "s", f.s);
  put(p, "K", f.K);
  put(p, "delta", f.delta);
  put(p, "samples", f.samples);
  put(p, "m", f.m);
  put(p, "a", f.a);
  put(p, "a1", f.a1);
  put(p, "a2", f.a2);
  put(p, "a3", f.a3);
  put(p, "radius", f.radius);
  put(p, "spine_depth", f.spine_depth);
  put(p, "quench_radius", f.quench_radius);
  m.master_seed = f.seed;
  m.worker_count = f.workers;
  if (!f.out.empty()) {
    m.output_dir = f.out;
  } else if (const char* env = std::getenv("SUPERTREES_OUTPUT_DIR")) {
    m.output_dir = (std::filesystem::path(env) / name).string();
  } else {
    m.output_dir = (std::filesystem::path("supertrees-out") / name).string();
  }
  return m;
}

int report_error(const std::string& subcommand, const std::string& kind, const std::string& message, int code,
                 const std::string& dir) {
  const json record = {{"status", "error"}, {"subcommand", subcommand}, {"error", kind}, {"message", message}};
  std::cerr << record.dump() << '\n';
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!ec) std::ofstream(std::filesystem::path(dir) / "error.json") << record.dump(2) << '\n';
  }
  return code;
}

const std::map<std::string, std::string> kDescriptions = {
    {"enumerate", "exact coefficients of a generating series"},
    {"verify-asymptotics", "fit base, exponent and constant of series coefficients"},
    {"gibbs-law", "exact law of the first-level component count"},
    {"gibbs-llt", "local limit discrepancy of the rescaled component count"},
    {"pd-sample", "ranked Poisson-Dirichlet weights"},
    {"pd-lemma", "products of independent PD weights against the direct law"},
    {"sample-tree", "uniform or Boltzmann trees and their statistics"},
    {"local-limit", "ball laws around the root and a random vertex"},
    {"scaling-experiment", "rescaled tree distances against the glued limit"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact enumeration, sampling and limit experiments for Kemp supertrees"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : supertrees::experiment::subcommands()) add_flags(app.add_subcommand(name, kDescriptions.at(name)), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error("", "usage_error", e.what(), 2, "");
  }
  const std::string name = app.get_subcommands().front()->get_name();
  Manifest m = manifest_from(name, flags);
  try {
    const json summary = supertrees::experiment::run(m);
    std::cout << json{{"status", "ok"}, {"subcommand", name}, {"output_dir", m.output_dir},
                      {"manifest_hash", m.hash()}, {"summary", summary}}.dump(2)
              << '\n';
    return 0;
  } catch (const supertrees::precondition_error& e) {
    return report_error(name, "validation_error", e.what(), 2, m.output_dir);
  } catch (const std::exception& e) {
    return report_error(name, "runtime_error", e.what(), 1, m.output_dir);
  }
}
