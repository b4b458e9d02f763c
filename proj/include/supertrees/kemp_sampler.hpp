#pragma once

// Random Kemp trees: exactly uniform n-vertex trees, critical Boltzmann
// trees (P(F) = 4^-|F|) and the spine trees describing the local limit at
// the root.

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "supertrees/bignum.hpp"
#include "supertrees/error.hpp"
#include "supertrees/exact_choice.hpp"
#include "supertrees/random.hpp"
#include "supertrees/series.hpp"
#include "supertrees/tree.hpp"

namespace supertrees::trees {

/// Exact counts f_{j,m} and pair weights h_{j,m} = [x^m](1 + F_j)^2 for
/// j <= d, m <= N, with doubles scaled by 4^-m for the fast path.
class KempTables {
 public:
  KempTables(int d, std::size_t N) : d_(d), N_(N) {
    detail::require(d >= 1, "dimension must be at least 1");
    detail::require(N >= 1, "table size must be at least 1");
    f_.resize(static_cast<std::size_t>(d) + 1);
    h_.resize(static_cast<std::size_t>(d) + 1);
    f_[0].assign(N + 2, 0);
    f_[0][0] = 1;
    h_[0].assign(N + 2, 0);
    // Level 1 in closed form: Catalan numbers, and (1 + F_1)^2 = F_1 / x.
    f_[1].assign(N + 2, 0);
    for (std::size_t m = 1; m <= N + 1; ++m)
      f_[1][m] = binomial(2 * static_cast<unsigned long>(m), static_cast<unsigned long>(m)) / (m + 1);
    h_[1].assign(N + 2, 0);
    for (std::size_t m = 0; m <= N; ++m) h_[1][m] = f_[1][m + 1];
    f_[1].resize(N + 1);
    h_[1].resize(N + 1);
    f_[0].resize(N + 1);
    h_[0].resize(N + 1);
    for (int j = 2; j <= d; ++j) {
      series::KempLevel level = series::kemp_next_level(f_[static_cast<std::size_t>(j) - 1], N);
      f_[static_cast<std::size_t>(j)] = std::move(level.count);
      h_[static_cast<std::size_t>(j)] = std::move(level.pair);
    }
    fs_.resize(f_.size());
    hs_.resize(h_.size());
    for (std::size_t j = 0; j < f_.size(); ++j) {
      fs_[j].resize(N + 1);
      hs_[j].resize(N + 1);
      for (std::size_t m = 0; m <= N; ++m) {
        fs_[j][m] = scaled_double(f_[j][m], 2 * static_cast<long>(m));
        hs_[j][m] = scaled_double(h_[j][m], 2 * static_cast<long>(m));
      }
    }
  }

  int dimension() const { return d_; }
  std::size_t order() const { return N_; }
  const mpz_class& count(int j, std::size_t m) const { return f_.at(static_cast<std::size_t>(j)).at(m); }
  const mpz_class& pair(int j, std::size_t m) const { return h_.at(static_cast<std::size_t>(j)).at(m); }
  double scaled_count(int j, std::size_t m) const { return fs_[static_cast<std::size_t>(j)][m]; }
  double scaled_pair(int j, std::size_t m) const { return hs_[static_cast<std::size_t>(j)][m]; }

 private:
  int d_;
  std::size_t N_;
  std::vector<std::vector<mpz_class>> f_, h_;
  std::vector<std::vector<double>> fs_, hs_;
};

namespace impl {

// 0, r, 1, r-1, 2, ...: both ends of a size split first.
inline std::size_t zigzag(std::size_t i, std::size_t lo, std::size_t hi) {
  const std::size_t k = i / 2;
  return i % 2 == 0 ? lo + k : hi - k;
}

}  // namespace impl

/// Uniform random tree among the f_{d,n} Kemp trees with n vertices.
///
/// At each F_j root of size m the attachment size a is drawn with weight
/// f_{j-1,a} h_{j,m-1-a}, then the left size l of the remaining r = m-1-a
/// vertices with weight g_l g_{r-l} (g_0 = 1, g_l = f_{j,l}).
template <class Engine>
SuperTree sample_uniform_kemp(const KempTables& tables, int d, std::size_t n, Engine& rng) {
  detail::require(d >= 1 && d <= tables.dimension(), "dimension not covered by the tables");
  detail::require(n >= 1 && n <= tables.order(), "size not covered by the tables");
  if (sgn(tables.count(d, n)) == 0) throw degenerate_error("no Kemp tree of this size and dimension");

  SuperTree tree(Family::kemp, d);
  tree.reserve(n);
  struct Task {
    int node;
    int j;
    std::size_t m;
  };
  std::vector<Task> stack{{0, d, n}};
  auto g = [&](int j, std::size_t l) -> double { return l == 0 ? 1.0 : tables.scaled_count(j, l); };
  auto g_exact = [&](int j, std::size_t l) -> mpz_class { return l == 0 ? mpz_class(1) : tables.count(j, l); };

  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    const std::size_t m = t.m;
    const int j = t.j;

    std::size_t a = 0;
    if (j >= 2) {
      // a in 1..m-1
      const std::size_t options = m - 1;
      const std::size_t pick = exact_categorical(
          rng, options,
          [&](std::size_t i) {
            const std::size_t x = impl::zigzag(i, 1, m - 1);
            return tables.scaled_count(j - 1, x) * tables.scaled_pair(j, m - 1 - x);
          },
          4.0 * tables.scaled_count(j, m),
          [&](std::size_t i) {
            const std::size_t x = impl::zigzag(i, 1, m - 1);
            return mpz_class(tables.count(j - 1, x) * tables.pair(j, m - 1 - x));
          });
      a = impl::zigzag(pick, 1, m - 1);
    }
    const std::size_t r = m - 1 - a;
    std::size_t l = 0;
    if (r > 0) {
      const std::size_t pick = exact_categorical(
          rng, r + 1,
          [&](std::size_t i) {
            const std::size_t x = impl::zigzag(i, 0, r);
            return g(j, x) * g(j, r - x);
          },
          tables.scaled_pair(j, r),
          [&](std::size_t i) {
            const std::size_t x = impl::zigzag(i, 0, r);
            return mpz_class(g_exact(j, x) * g_exact(j, r - x));
          });
      l = impl::zigzag(pick, 0, r);
    }
    if (l > 0) stack.push_back({tree.add_child(t.node, Slot::left), j, l});
    if (r - l > 0) stack.push_back({tree.add_child(t.node, Slot::right), j, r - l});
    if (a > 0) stack.push_back({tree.add_child(t.node, Slot::attach), j - 1, a});
  }
  return tree;
}

template <class Engine>
SuperTree sample_uniform_kemp(int d, std::size_t n, Engine& rng) {
  const KempTables tables(d, n);
  return sample_uniform_kemp(tables, d, n, rng);
}

namespace impl {

// Grows a critical Boltzmann F_j tree below `root`, which must already
// exist. Vertices `budget` edges below `root` become frontier vertices and
// are not expanded; budget < 0 means no depth limit. Returns false once the
// tree exceeds `size_cap` vertices.
template <class Engine>
bool grow_boltzmann(SuperTree& tree, int root, int j, int budget, std::size_t size_cap, Engine& rng) {
  struct Task {
    int node;
    int j;
    int budget;
  };
  std::vector<Task> stack{{root, j, budget}};
  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    if (t.budget == 0) {
      tree.set_frontier(t.node);
      continue;
    }
    const int next = t.budget < 0 ? -1 : t.budget - 1;
    // Draw order is fixed: left, right, attachment.
    const bool left = coin(rng);
    const bool right = coin(rng);
    if (left) stack.push_back({tree.add_child(t.node, Slot::left), t.j, next});
    if (right) stack.push_back({tree.add_child(t.node, Slot::right), t.j, next});
    if (t.j >= 2) stack.push_back({tree.add_child(t.node, Slot::attach), t.j - 1, next});
    if (tree.size() > size_cap) return false;
  }
  return true;
}

}  // namespace impl

inline constexpr std::size_t kDefaultSizeCap = 1'000'000;

/// Critical Boltzmann tree of F_d: P(F) = 4^-|F|. Returns nullopt when the
/// tree grows past `size_cap` vertices (the size has infinite mean).
template <class Engine>
std::optional<SuperTree> sample_boltzmann_kemp(int d, Engine& rng, std::size_t size_cap = kDefaultSizeCap) {
  detail::require(d >= 1, "dimension must be at least 1");
  detail::require(size_cap >= 1, "size cap must be at least 1");
  SuperTree tree(Family::kemp, d);
  if (!impl::grow_boltzmann(tree, 0, d, -1, size_cap, rng)) return std::nullopt;
  return tree;
}

/// The root local limit cut at graph distance `depth` from the root: a
/// level-1 spine v_0, ..., v_depth where each v_i (i < depth) carries a
/// Boltzmann F_{d-1} attachment, a left or right spine edge and, in half of
/// the cases, a Boltzmann F_d tree on the other side. Everything at
/// distance `depth` is a frontier vertex, so the result is exactly the
/// depth-ball of the limit tree. nullopt if the size cap is hit.
template <class Engine>
std::optional<SuperTree> sample_spine_truncated(int d, int depth, Engine& rng,
                                                std::size_t size_cap = kDefaultSizeCap) {
  detail::require(d >= 2, "the spine construction needs d >= 2");
  detail::require(depth >= 0, "depth must be nonnegative");
  SuperTree tree(Family::kemp, d);
  int v = 0;
  for (int i = 0; i < depth; ++i) {
    const std::size_t c = uniform_index(rng, 4);  // cases 1..4
    const Slot spine = (c == 0 || c == 2) ? Slot::left : Slot::right;
    const Slot other = spine == Slot::left ? Slot::right : Slot::left;
    const int budget = depth - i - 1;
    const int attach = tree.add_child(v, Slot::attach);
    if (!impl::grow_boltzmann(tree, attach, d - 1, budget, size_cap, rng)) return std::nullopt;
    if (c >= 2) {
      const int extra = tree.add_child(v, other);
      if (!impl::grow_boltzmann(tree, extra, d, budget, size_cap, rng)) return std::nullopt;
    }
    v = tree.add_child(v, spine);
  }
  tree.set_frontier(v);
  return tree;
}

}  // namespace supertrees::trees
