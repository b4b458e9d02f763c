#pragma once

// Distance-matrix samples of the glued space S(alpha, theta, s, L): pick
// ranked weights V_1 > V_2 > ..., drop each sample point into component i
// with probability V_i (into the gluing point with the leftover mass), take
// the points of component i from an independent L-sample with distances
// multiplied by V_i^s, and join components through the gluing point.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "supertrees/bgw.hpp"
#include "supertrees/distance_sample.hpp"
#include "supertrees/error.hpp"
#include "supertrees/kemp_sampler.hpp"
#include "supertrees/pd.hpp"
#include "supertrees/random.hpp"
#include "supertrees/stats.hpp"
#include "supertrees/tree_stats.hpp"

namespace supertrees::limit {

/// k points of an independent sample of the base law L (k >= 1): their
/// distance matrix and their distances to the root.
using BaseLaw = std::function<DistanceSample(std::size_t k, Rng& rng)>;

/// Ranked weights to glue with; defaults to a PD(alpha, theta) sample.
using WeightSource = std::function<pd::RankedWeights(Rng& rng)>;

struct GlueSpec {
  double alpha = 0.5;
  double theta = -0.25;
  double s = 0.5;
  BaseLaw base_law;
  std::size_t K = 500;
  WeightSource weights;  // optional override
};

inline void validate(const GlueSpec& spec) {
  if (!spec.weights) pd::validate_pd(spec.alpha, spec.theta);
  detail::require(spec.s > 0.0, "metric exponent s must be positive");
  detail::require(spec.K >= 1, "component truncation K must be at least 1");
  detail::require(static_cast<bool>(spec.base_law), "glue spec needs a base law");
}

/// Always the same weights, e.g. a single component of mass 1.
inline WeightSource fixed_weights(std::vector<double> points, double remainder = 0.0) {
  return [points = std::move(points), remainder](Rng&) {
    pd::RankedWeights w;
    w.points = points;
    w.remainder = remainder;
    return w;
  };
}

/// Weights of the two-stage construction X_i Y_{i,j} of the concatenation
/// lemma.
inline WeightSource lemma_weights(double a1, double a2, double a3, std::size_t K) {
  return [=](Rng& rng) { return pd::combine_products(a1, a2, a3, K, rng); };
}

struct GluedSample : DistanceSample {
  double atom_mass = 0.0;  // weight left to the gluing point by the truncation
  using DistanceSample::DistanceSample;
};

inline GluedSample sample_glued_distances(const GlueSpec& spec, std::size_t k, Rng& rng) {
  validate(spec);
  detail::require(k >= 2, "glued samples need k >= 2");
  const pd::RankedWeights V = spec.weights ? spec.weights(rng) : pd::sample_pd(spec.alpha, spec.theta, spec.K, rng);

  GluedSample out(k);
  out.atom_mass = V.remainder;
  // Component of each point; -1 is the gluing point.
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t p = 0; p < k; ++p) {
    const double u = uniform01(rng);
    double cum = 0.0;
    int comp = -1;
    for (std::size_t i = 0; i < V.points.size(); ++i) {
      cum += V.points[i];
      if (u < cum) {
        comp = static_cast<int>(i);
        break;
      }
    }
    out.component_ids[p] = comp;
    members[comp].push_back(p);
  }
  for (const auto& [comp, idx] : members) {
    if (comp < 0) {
      out.root_included = true;
      continue;  // heights 0, distances fixed below
    }
    const double factor = std::pow(V.points[static_cast<std::size_t>(comp)], spec.s);
    const DistanceSample x = spec.base_law(idx.size(), rng);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      out.heights[idx[a]] = factor * x.heights[a];
      for (std::size_t b = a + 1; b < idx.size(); ++b) out.set(idx[a], idx[b], factor * x.at(a, b));
    }
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (out.component_ids[a] != out.component_ids[b] || out.component_ids[a] < 0)
        out.set(a, b, out.heights[a] + out.heights[b]);
  return out;
}

/// Brownian tree at resolution m: a uniform F_{1,m} tree with distances
/// multiplied by 2^(-3/2) m^(-1/2).
class BrownianProxy {
 public:
  explicit BrownianProxy(std::size_t m) : m_(m), tables_(std::make_shared<trees::KempTables>(1, m)) {
    detail::require(m >= 2, "resolution must be at least 2");
  }

  std::size_t resolution() const { return m_; }
  double scale() const { return std::pow(2.0, -1.5) / std::sqrt(static_cast<double>(m_)); }

  DistanceSample operator()(std::size_t k, Rng& rng) const {
    const trees::SuperTree t = trees::sample_uniform_kemp(*tables_, 1, m_, rng);
    return trees::sample_points(t, trees::depths(t), k, scale(), rng);
  }

  BaseLaw law() const {
    return [self = *this](std::size_t k, Rng& rng) { return self(k, rng); };
  }

 private:
  std::size_t m_;
  std::shared_ptr<const trees::KempTables> tables_;
};

inline BrownianProxy brownian_proxy(std::size_t m) { return BrownianProxy(m); }

/// a-stable tree at resolution m: a critical BGW tree with m vertices and
/// offspring tail c k^(-a-1), distances multiplied by m^(-(1-1/a)) and the
/// constant that gives the stable tree with branching mechanism lambda^a.
/// For a = 2 the offspring is geometric and the scale sigma/2 m^(-1/2)
/// targets the same Brownian tree as BrownianProxy.
class StableProxy {
 public:
  StableProxy(double a, std::size_t m) : a_(a), m_(m) {
    detail::require(a > 1.0 && a <= 2.0, "stable index must lie in (1, 2]");
    detail::require(m >= 2, "resolution must be at least 2");
    if (a == 2.0) {
      law_ = std::make_shared<trees::OffspringLaw>(trees::OffspringLaw::geometric());
      scale_ = std::sqrt(law_->variance()) / 2.0 / std::sqrt(static_cast<double>(m));
    } else {
      law_ = std::make_shared<trees::OffspringLaw>(trees::OffspringLaw::power_law(a));
      const double c = law_->tail_constant();
      const double b = std::pow(c * std::tgamma(2.0 - a) / (a * (a - 1.0)), 1.0 / a);
      scale_ = b * std::pow(static_cast<double>(m), -(1.0 - 1.0 / a));
    }
  }

  double index() const { return a_; }
  std::size_t resolution() const { return m_; }
  double scale() const { return scale_; }
  const trees::OffspringLaw& offspring() const { return *law_; }

  DistanceSample operator()(std::size_t k, Rng& rng) const {
    const trees::SuperTree t = trees::sample_conditioned_bgw(*law_, m_, rng);
    return trees::sample_points(t, trees::depths(t), k, scale_, rng);
  }

  BaseLaw law() const {
    return [self = *this](std::size_t k, Rng& rng) { return self(k, rng); };
  }

 private:
  double a_;
  std::size_t m_;
  double scale_ = 1.0;
  std::shared_ptr<const trees::OffspringLaw> law_;
};

inline StableProxy stable_proxy(double a, std::size_t m) { return StableProxy(a, m); }

enum class Statistic { ks, wasserstein1 };

/// Compares two ensembles entry by entry: the j-th smallest off-diagonal
/// distance of every sample forms one scalar sample per ensemble, and the
/// largest discrepancy over j is returned. For k = 2 this is the plain
/// two-point distance comparison.
template <class A, class B>
double two_sample_discrepancy(const std::vector<A>& a, const std::vector<B>& b, Statistic stat = Statistic::ks) {
  detail::require(!a.empty() && !b.empty(), "ensembles must be nonempty");
  const std::size_t k = a.front().k;
  for (const auto& x : a) detail::require(x.k == k, "ensembles must share k");
  for (const auto& x : b) detail::require(x.k == k, "ensembles must share k");
  detail::require(k >= 2, "ensembles need k >= 2");
  const std::size_t entries = k * (k - 1) / 2;
  std::vector<std::vector<double>> ea(entries), eb(entries);
  for (const auto& x : a) {
    const auto e = x.sorted_entries();
    for (std::size_t j = 0; j < entries; ++j) ea[j].push_back(e[j]);
  }
  for (const auto& x : b) {
    const auto e = x.sorted_entries();
    for (std::size_t j = 0; j < entries; ++j) eb[j].push_back(e[j]);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < entries; ++j) {
    const double v = stat == Statistic::ks ? stats::ks_statistic(ea[j], eb[j]) : stats::wasserstein1(ea[j], eb[j]);
    worst = std::max(worst, v);
  }
  return worst;
}

/// Ensemble CSV: one row per pair i < j of every replica.
template <class S>
void write_ensemble_csv(std::ostream& out, const std::vector<S>& ensemble) {
  out << "replica,i,j,distance,component_i,component_j\n";
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const auto& x = ensemble[r];
    for (std::size_t i = 0; i < x.k; ++i)
      for (std::size_t j = i + 1; j < x.k; ++j)
        out << r << ',' << i << ',' << j << ',' << x.at(i, j) << ',' << x.component_ids[i] << ','
            << x.component_ids[j] << '\n';
  }
}

}  // namespace supertrees::limit
