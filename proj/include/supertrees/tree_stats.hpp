#pragma once

// Statistics of a single tree: level components, heights and diameters,
// sampled distance matrices and canonical codes of balls.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "supertrees/distance_sample.hpp"
#include "supertrees/error.hpp"
#include "supertrees/random.hpp"
#include "supertrees/tree.hpp"

namespace supertrees::trees {

/// Number of vertices in the subtree of every vertex.
inline std::vector<std::size_t> subtree_sizes(const SuperTree& t) {
  std::vector<std::size_t> size(t.size(), 1);
  for (std::size_t v = t.size(); v-- > 1;) size[static_cast<std::size_t>(t.node(static_cast<int>(v)).parent)] += size[v];
  return size;
}

/// Graph distance of every vertex to the root.
inline std::vector<int> depths(const SuperTree& t) {
  std::vector<int> depth(t.size(), 0);
  for (std::size_t v = 1; v < t.size(); ++v)
    depth[v] = depth[static_cast<std::size_t>(t.node(static_cast<int>(v)).parent)] + 1;
  return depth;
}

/// Ranked sizes of the level-l components: the subtrees rooted at the
/// attachment children of level-(l-1) vertices. Level 1 gives the number of
/// first-level vertices as a single entry.
inline std::vector<std::size_t> level_component_sizes(const SuperTree& t, int level) {
  detail::require(level >= 1, "levels start at 1");
  if (t.family() == Family::kemp) detail::require(level <= t.dimension(), "level exceeds the dimension");
  if (level == 1) {
    std::size_t n1 = 0;
    for (const Node& x : t.nodes()) n1 += x.level == 1 ? 1 : 0;
    return {n1};
  }
  const std::vector<std::size_t> size = subtree_sizes(t);
  std::vector<std::size_t> out;
  for (std::size_t v = 1; v < t.size(); ++v) {
    const Node& x = t.node(static_cast<int>(v));
    if (x.slot == Slot::attach && x.level == level) out.push_back(size[v]);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct MetricStats {
  int height = 0;
  int diameter = 0;
  int first_level_diameter = 0;
};

namespace impl {

// Farthest vertex from `source` among vertices accepted by `keep`, and its
// distance. `dist` is scratch space of size t.size().
template <class Keep>
std::pair<int, int> farthest(const SuperTree& t, int source, Keep&& keep, std::vector<int>& dist,
                             std::vector<int>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  queue.push_back(source);
  dist[static_cast<std::size_t>(source)] = 0;
  int best = source;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (dist[static_cast<std::size_t>(v)] > dist[static_cast<std::size_t>(best)]) best = v;
    t.for_each_neighbour(v, [&](int u) {
      if (dist[static_cast<std::size_t>(u)] < 0 && keep(u)) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(u);
      }
    });
  }
  return {best, dist[static_cast<std::size_t>(best)]};
}

}  // namespace impl

/// Height, diameter, and diameter of the level-1 subtree (two breadth-first
/// sweeps each).
inline MetricStats metric_stats(const SuperTree& t) {
  MetricStats s;
  std::vector<int> dist(t.size()), queue;
  queue.reserve(t.size());
  auto all = [](int) { return true; };
  const auto [far, h] = impl::farthest(t, 0, all, dist, queue);
  s.height = h;
  s.diameter = impl::farthest(t, far, all, dist, queue).second;
  auto first = [&](int v) { return t.node(v).level == 1; };
  const int far1 = impl::farthest(t, 0, first, dist, queue).first;
  s.first_level_diameter = impl::farthest(t, far1, first, dist, queue).second;
  return s;
}

/// Graph distance via the lowest common ancestor.
inline int tree_distance(const SuperTree& t, const std::vector<int>& depth, int u, int v) {
  int a = u, b = v, steps = 0;
  while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)]) {
    a = t.node(a).parent;
    ++steps;
  }
  while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)]) {
    b = t.node(b).parent;
    ++steps;
  }
  while (a != b) {
    a = t.node(a).parent;
    b = t.node(b).parent;
    steps += 2;
  }
  return steps;
}

/// Index of the level-2 component containing v (its attachment root), or -1
/// for first-level vertices.
inline int level_two_component(const SuperTree& t, int v) {
  int last_attach = -1;
  for (int x = v; x > 0; x = t.node(x).parent)
    if (t.node(x).slot == Slot::attach && t.node(x).level == 2) last_attach = x;
  return last_attach;
}

/// k i.i.d. uniform vertices (k >= 1); distances and root heights
/// multiplied by scale.
template <class Engine>
DistanceSample sample_points(const SuperTree& t, const std::vector<int>& depth, std::size_t k, double scale,
                             Engine& rng) {
  detail::require(k >= 1, "need at least one point");
  detail::require(scale > 0.0, "scale must be positive");
  DistanceSample out(k);
  std::vector<int> pts(k);
  for (std::size_t i = 0; i < k; ++i) {
    pts[i] = static_cast<int>(uniform_index(rng, t.size()));
    out.heights[i] = scale * depth[static_cast<std::size_t>(pts[i])];
    out.component_ids[i] = level_two_component(t, pts[i]);
    out.root_included = out.root_included || pts[i] == 0;
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) out.set(i, j, scale * tree_distance(t, depth, pts[i], pts[j]));
  return out;
}

/// k >= 2 i.i.d. uniform vertices with their scaled distance matrix.
template <class Engine>
DistanceSample distance_matrix_sample(const SuperTree& t, const std::vector<int>& depth, std::size_t k,
                                      double scale, Engine& rng) {
  detail::require(k >= 2, "distance samples need k >= 2");
  return sample_points(t, depth, k, scale, rng);
}

template <class Engine>
DistanceSample distance_matrix_sample(const SuperTree& t, std::size_t k, double scale, Engine& rng) {
  return distance_matrix_sample(t, depths(t), k, scale, rng);
}

// ---------------------------------------------------------------------------
// Ball codes

enum class LevelTags { absolute, relative };

/// Canonical code of the ball of `radius` around `center` in a Kemp tree.
///
/// The ball is re-rooted at the center. From each vertex the edges are
/// listed as: the edge towards the original root (l, r or a: the slot the
/// vertex occupies below its parent), then the child edges L, R, A. Each
/// label occurs at most once per vertex, so equal codes are the same as
/// isomorphic balls. Vertices at distance `radius` carry a '.' marker.
///
/// code := '(' level ['.'] { label code } ')'
inline std::string ball_encode(const SuperTree& t, int center, int radius,
                               LevelTags tags = LevelTags::absolute) {
  detail::require(t.family() == Family::kemp, "ball codes are defined for Kemp trees");
  detail::require(center >= 0 && static_cast<std::size_t>(center) < t.size(), "center is not a vertex");
  detail::require(radius >= 0, "radius must be nonnegative");
  const int offset = tags == LevelTags::relative ? t.node(center).level : 0;
  std::string out;
  std::function<void(int, int, int)> enc = [&](int v, int from, int dist) {
    const Node& x = t.node(v);
    out += '(';
    out += std::to_string(x.level - offset);
    if (dist == radius) {
      out += '.';
      out += ')';
      return;
    }
    if (x.frontier) throw precondition_error("ball reaches beyond the generated part of the tree");
    if (x.parent >= 0 && x.parent != from) {
      out += static_cast<char>(slot_letter(x.slot) - 'A' + 'a');
      enc(x.parent, v, dist + 1);
    }
    for (int c = x.first_child; c >= 0; c = t.node(c).next_sibling) {
      if (c == from) continue;
      out += slot_letter(t.node(c).slot);
      enc(c, v, dist + 1);
    }
    out += ')';
  };
  enc(center, -1, 0);
  return out;
}

}  // namespace supertrees::trees
