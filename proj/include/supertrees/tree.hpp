#pragma once

// Rooted trees with slot-labelled edges.
//
// Kemp trees: every vertex has at most one left child, one right child and
// one attachment child; left/right children share the parent's level, the
// attachment child sits one level higher. Plane trees (BGW samples) use an
// ordered child list with the `child` slot.
//
// Text form:
//   tree  := header ':' node
//   header:= 'K' dimension | 'P'
//   node  := '(' level ['*'] { slot node } ')'
//   slot  := 'L' | 'R' | 'A' | 'C'
// '*' marks a frontier vertex whose neighbourhood beyond itself was not
// generated. Children appear in the order L, R, A for Kemp trees.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "supertrees/error.hpp"

namespace supertrees::trees {

enum class Slot : std::uint8_t { root, left, right, attach, child };
enum class Family : std::uint8_t { kemp, plane };

inline char slot_letter(Slot s) {
  switch (s) {
    case Slot::left: return 'L';
    case Slot::right: return 'R';
    case Slot::attach: return 'A';
    case Slot::child: return 'C';
    default: return '?';
  }
}

inline int slot_rank(Slot s) { return static_cast<int>(s); }

struct Node {
  int parent = -1;
  int first_child = -1;
  int last_child = -1;
  int next_sibling = -1;
  Slot slot = Slot::root;
  int level = 1;
  bool frontier = false;
};

class SuperTree {
 public:
  SuperTree() = default;

  /// A tree consisting of its root only.
  SuperTree(Family family, int dimension, int root_level = 1) : family_(family), dimension_(dimension) {
    Node root;
    root.level = root_level;
    nodes_.push_back(root);
  }

  Family family() const { return family_; }
  int dimension() const { return dimension_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(int v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<Node>& nodes() const { return nodes_; }

  void reserve(std::size_t n) { nodes_.reserve(n); }
  void set_frontier(int v, bool value = true) { nodes_.at(static_cast<std::size_t>(v)).frontier = value; }

  /// Adds a child in `slot` below `parent` and returns its index. Kemp
  /// children are kept in slot order; a Kemp slot can be used once.
  int add_child(int parent, Slot slot, bool frontier = false) {
    detail::require(parent >= 0 && static_cast<std::size_t>(parent) < nodes_.size(), "parent out of range");
    if (family_ == Family::kemp) {
      detail::require(slot == Slot::left || slot == Slot::right || slot == Slot::attach,
                      "Kemp trees use the L, R and A slots");
      detail::require(child(parent, slot) < 0, "slot already occupied");
    } else {
      detail::require(slot == Slot::child, "plane trees use the C slot");
    }
    Node c;
    c.parent = parent;
    c.slot = slot;
    c.level = nodes_[static_cast<std::size_t>(parent)].level + (slot == Slot::attach ? 1 : 0);
    c.frontier = frontier;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(c);
    Node& p = nodes_[static_cast<std::size_t>(parent)];
    if (family_ == Family::plane || p.last_child < 0 ||
        slot_rank(nodes_[static_cast<std::size_t>(p.last_child)].slot) < slot_rank(slot)) {
      if (p.last_child < 0) p.first_child = id;
      else nodes_[static_cast<std::size_t>(p.last_child)].next_sibling = id;
      p.last_child = id;
      return id;
    }
    // Insert before the first sibling with a larger slot.
    int prev = -1, cur = p.first_child;
    while (cur >= 0 && slot_rank(nodes_[static_cast<std::size_t>(cur)].slot) < slot_rank(slot)) {
      prev = cur;
      cur = nodes_[static_cast<std::size_t>(cur)].next_sibling;
    }
    nodes_[static_cast<std::size_t>(id)].next_sibling = cur;
    if (prev < 0) p.first_child = id;
    else nodes_[static_cast<std::size_t>(prev)].next_sibling = id;
    return id;
  }

  /// Child of v in a Kemp slot, or -1.
  int child(int v, Slot slot) const {
    for (int c = node(v).first_child; c >= 0; c = node(c).next_sibling)
      if (node(c).slot == slot) return c;
    return -1;
  }

  std::vector<int> children(int v) const {
    std::vector<int> out;
    for (int c = node(v).first_child; c >= 0; c = node(c).next_sibling) out.push_back(c);
    return out;
  }

  std::size_t child_count(int v) const {
    std::size_t k = 0;
    for (int c = node(v).first_child; c >= 0; c = node(c).next_sibling) ++k;
    return k;
  }

  /// Calls f(u) for every graph neighbour u of v (parent first).
  template <class F>
  void for_each_neighbour(int v, F&& f) const {
    const Node& x = node(v);
    if (x.parent >= 0) f(x.parent);
    for (int c = x.first_child; c >= 0; c = node(c).next_sibling) f(c);
  }

  /// Structural invariants; throws on violation.
  void check() const {
    detail::require(!nodes_.empty(), "a tree has at least one vertex");
    detail::require(nodes_[0].parent < 0, "vertex 0 must be the root");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      const Node& x = nodes_[i];
      detail::require(x.parent >= 0 && static_cast<std::size_t>(x.parent) < i, "parents precede children");
      const Node& p = nodes_[static_cast<std::size_t>(x.parent)];
      detail::require(x.level == p.level + (x.slot == Slot::attach ? 1 : 0), "inconsistent level tag");
      if (family_ == Family::kemp) detail::require(x.level <= dimension_, "level exceeds the dimension");
    }
  }

  /// Number of vertices on each level, index 0 for level 1.
  std::vector<std::size_t> level_counts() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(std::max(dimension_, 1)), 0);
    for (const Node& x : nodes_) {
      const auto l = static_cast<std::size_t>(x.level - 1);
      if (l >= out.size()) out.resize(l + 1, 0);
      ++out[l];
    }
    return out;
  }

 private:
  Family family_ = Family::kemp;
  int dimension_ = 1;
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Text form

inline void serialize_node(const SuperTree& t, int root, std::string& out) {
  // Iterative pre-order so deep trees do not exhaust the stack.
  struct Frame {
    int v;
    int next;
  };
  std::vector<Frame> stack;
  auto open = [&](int v) {
    out += '(';
    out += std::to_string(t.node(v).level);
    if (t.node(v).frontier) out += '*';
    stack.push_back({v, t.node(v).first_child});
  };
  open(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < 0) {
      out += ')';
      stack.pop_back();
      continue;
    }
    const int c = f.next;
    f.next = t.node(c).next_sibling;
    out += slot_letter(t.node(c).slot);
    open(c);
  }
}

inline std::string serialize(const SuperTree& t) {
  std::string out = t.family() == Family::kemp ? "K" + std::to_string(t.dimension()) + ":" : std::string("P:");
  out.reserve(out.size() + 4 * t.size());
  serialize_node(t, 0, out);
  return out;
}

inline SuperTree parse_tree(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const char* what) {
    throw precondition_error(std::string("malformed tree text: ") + what + " at offset " + std::to_string(pos));
  };
  auto peek = [&]() -> char { return pos < text.size() ? text[pos] : '\0'; };
  auto number = [&]() {
    const std::size_t start = pos;
    if (peek() == '-') ++pos;
    while (peek() >= '0' && peek() <= '9') ++pos;
    if (pos == start) fail("expected a number");
    return std::stoi(std::string(text.substr(start, pos - start)));
  };

  Family family;
  int dimension = 0;
  if (peek() == 'K') {
    ++pos;
    family = Family::kemp;
    dimension = number();
  } else if (peek() == 'P') {
    ++pos;
    family = Family::plane;
  } else {
    fail("expected K or P");
  }
  if (peek() != ':') fail("expected ':'");
  ++pos;
  if (peek() != '(') fail("expected '('");
  ++pos;
  SuperTree t(family, dimension, number());
  if (peek() == '*') {
    ++pos;
    t.set_frontier(0);
  }
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const char c = peek();
    if (c == ')') {
      ++pos;
      stack.pop_back();
      continue;
    }
    Slot slot;
    switch (c) {
      case 'L': slot = Slot::left; break;
      case 'R': slot = Slot::right; break;
      case 'A': slot = Slot::attach; break;
      case 'C': slot = Slot::child; break;
      default: fail("expected a slot letter or ')'");
    }
    ++pos;
    if (peek() != '(') fail("expected '('");
    ++pos;
    const int parent = stack.back();
    const int level = number();
    const int v = t.add_child(parent, slot);
    if (t.node(v).level != level) fail("level tag does not match the slot");
    if (peek() == '*') {
      ++pos;
      t.set_frontier(v);
    }
    stack.push_back(v);
  }
  if (pos != text.size()) fail("trailing characters");
  t.check();
  return t;
}

}  // namespace supertrees::trees
