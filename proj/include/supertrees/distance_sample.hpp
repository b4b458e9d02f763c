#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace supertrees {

/// Distances between k sampled points of a (rescaled) measured space.
struct DistanceSample {
  std::size_t k = 0;
  std::vector<double> matrix;      // row-major k x k
  std::vector<double> heights;     // distance of each point to the root
  std::vector<int> component_ids;  // -1: root atom / first level
  bool root_included = false;      // true when some point is the root itself

  DistanceSample() = default;
  explicit DistanceSample(std::size_t k_)
      : k(k_), matrix(k_ * k_, 0.0), heights(k_, 0.0), component_ids(k_, -1) {}

  double at(std::size_t i, std::size_t j) const { return matrix[i * k + j]; }
  void set(std::size_t i, std::size_t j, double d) {
    matrix[i * k + j] = d;
    matrix[j * k + i] = d;
  }

  /// Off-diagonal entries i < j in increasing order of value.
  std::vector<double> sorted_entries() const {
    std::vector<double> out;
    out.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) out.push_back(at(i, j));
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_metric(double tol = 1e-12) const {
    for (std::size_t i = 0; i < k; ++i) {
      if (at(i, i) != 0.0) return false;
      for (std::size_t j = 0; j < k; ++j) {
        if (at(i, j) != at(j, i) || at(i, j) < 0.0) return false;
        for (std::size_t l = 0; l < k; ++l)
          if (at(i, l) > at(i, j) + at(j, l) + tol) return false;
      }
    }
    return true;
  }

  /// Four-point condition d(x,y)+d(z,w) <= max(d(x,z)+d(y,w), d(x,w)+d(y,z)),
  /// which characterises metrics that embed in a tree. Heights are included
  /// as distances to an extra root point.
  bool is_tree_metric(double tol = 0.0) const {
    const std::size_t m = k + 1;
    auto d = [&](std::size_t a, std::size_t b) -> double {
      if (a == b) return 0.0;
      if (a == k) return heights[b];
      if (b == k) return heights[a];
      return at(a, b);
    };
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y)
        for (std::size_t z = 0; z < m; ++z)
          for (std::size_t w = 0; w < m; ++w) {
            const double lhs = d(x, y) + d(z, w);
            const double rhs = std::max(d(x, z) + d(y, w), d(x, w) + d(y, z));
            if (lhs > rhs + tol) return false;
          }
    return true;
  }
};

}  // namespace supertrees

