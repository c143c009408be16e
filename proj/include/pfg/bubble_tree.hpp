#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pfg/error.hpp"
#include "pfg/matrix.hpp"
#include "pfg/parallel.hpp"

namespace pfg {

// Triangular face, corners stored sorted ascending; ordering is lexicographic
// on the sorted corners.
struct Face {
  std::array<int, 3> v{-1, -1, -1};

  static Face of(int a, int b, int c) {
    Face f{{a, b, c}};
    std::sort(f.v.begin(), f.v.end());
    return f;
  }

  bool contains(int x) const { return v[0] == x || v[1] == x || v[2] == x; }

  friend bool operator==(const Face&, const Face&) = default;
  friend auto operator<=>(const Face&, const Face&) = default;
};

struct FaceHash {
  std::size_t operator()(const Face& f) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int x : f.v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Orientation of the tree edge between a node and its parent.
enum class Direction : std::uint8_t {
  toward_parent,  // edge points from the node to its parent
  toward_child,   // edge points from the parent into the node
};

struct BubbleNode {
  int id = -1;
  std::array<int, 4> vertices{};  // sorted
  int parent = -1;
  int extra = -1;           // the bubble vertex outside sep_triangle (non-root only)
  Face sep_triangle{};      // triangle shared with the parent (non-root only)
  std::vector<int> children;

  bool is_root() const { return parent < 0; }
  bool contains(int x) const {
    return vertices[0] == x || vertices[1] == x || vertices[2] == x || vertices[3] == x;
  }
};

// Rooted bubble tree grown alongside TMFG construction: one node per 4-clique,
// one edge per separating triangle. Descendants of an edge lie on the interior
// side of its separating triangle.
class BubbleTree {
public:
  void init(const std::array<int, 4>& seed_vertices, const Face& outer) {
    nodes_.clear();
    owner_.clear();
    directions_.clear();
    in_val_.clear();
    out_val_.clear();
    corner_sums_.clear();
    BubbleNode root;
    root.id = 0;
    root.vertices = seed_vertices;
    nodes_.push_back(root);
    root_ = 0;
    outer_face_ = outer;
    const auto& v = seed_vertices;
    register_face(Face::of(v[0], v[1], v[2]), 0);
    register_face(Face::of(v[0], v[1], v[3]), 0);
    register_face(Face::of(v[0], v[2], v[3]), 0);
    register_face(Face::of(v[1], v[2], v[3]), 0);
  }

  // Adds the bubble created by inserting vertex v into face t. If t is the
  // current outer face the new bubble becomes the root and captures the old
  // root as its child; otherwise it hangs off the bubble that owns t. Returns
  // the new node id.
  int update(int v, const Face& t) {
    auto it = owner_.find(t);
    if (it == owner_.end())
      fail(errc::unknown_face, "face {" + std::to_string(t.v[0]) + "," + std::to_string(t.v[1]) +
                                   "," + std::to_string(t.v[2]) + "} is not part of the bubble tree");
    const int b = it->second;
    const int bstar = static_cast<int>(nodes_.size());
    BubbleNode node;
    node.id = bstar;
    node.vertices = {t.v[0], t.v[1], t.v[2], v};
    std::sort(node.vertices.begin(), node.vertices.end());
    nodes_.push_back(node);

    if (t == outer_face_) {
      // Inserting into the outer face: the old root moves under the new
      // bubble, and the outer face is re-fixed to {v, a, b} where a, b are the
      // two smallest corners of the old outer face.
      nodes_[b].parent = bstar;
      nodes_[b].sep_triangle = t;
      nodes_[b].extra = other_vertex(nodes_[b], t);
      nodes_[bstar].children.push_back(b);
      root_ = bstar;
      outer_face_ = Face::of(v, t.v[0], t.v[1]);
    } else {
      nodes_[bstar].parent = b;
      nodes_[bstar].sep_triangle = t;
      nodes_[bstar].extra = v;
      nodes_[b].children.push_back(bstar);
    }
    register_face(Face::of(v, t.v[0], t.v[1]), bstar);
    register_face(Face::of(v, t.v[0], t.v[2]), bstar);
    register_face(Face::of(v, t.v[1], t.v[2]), bstar);
    return bstar;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const BubbleNode& node(int id) const { return nodes_[id]; }
  const std::vector<BubbleNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const Face& outer_face() const { return outer_face_; }

  bool has_directions() const { return !directions_.empty(); }
  Direction direction(int id) const { return directions_[id]; }
  double in_val(int id) const { return in_val_[id]; }
  double out_val(int id) const { return out_val_[id]; }
  // Per-corner interior sums for a non-root node, aligned with sep_triangle.v.
  const std::array<double, 3>& corner_sums(int id) const { return corner_sums_[id]; }

  int tree_edge_count() const { return size() - 1; }

  // Height of the rooted tree (edges on the longest root-to-leaf path).
  int height() const {
    std::vector<int> depth(nodes_.size(), 0);
    int best = 0;
    for (int id : topological_order()) {
      if (id == root_) continue;
      depth[id] = depth[nodes_[id].parent] + 1;
      best = std::max(best, depth[id]);
    }
    return best;
  }

  // Root first, every parent before its children.
  std::vector<int> topological_order() const {
    std::vector<int> order;
    order.reserve(nodes_.size());
    order.push_back(root_);
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int c : nodes_[order[k]].children) order.push_back(c);
    return order;
  }

  // Number of tree edges directed away from the node; toward_child on a child
  // edge leaves this node, toward_parent on the parent edge leaves it too.
  int out_degree(int id) const {
    int deg = (!nodes_[id].is_root() && directions_[id] == Direction::toward_parent) ? 1 : 0;
    for (int c : nodes_[id].children)
      if (directions_[c] == Direction::toward_child) ++deg;
    return deg;
  }

  void set_directions_for_test(std::vector<Direction> dirs) { directions_ = std::move(dirs); }

  friend void compute_directions(BubbleTree& tree, const std::vector<double>& weighted_degree,
                                 const SimMatrix& s);

private:
  void register_face(const Face& f, int owner) { owner_[f] = owner; }

  static int other_vertex(const BubbleNode& node, const Face& t) {
    for (int x : node.vertices)
      if (!t.contains(x)) return x;
    return -1;
  }

  std::vector<BubbleNode> nodes_;
  std::unordered_map<Face, int, FaceHash> owner_;
  int root_ = -1;
  Face outer_face_{};
  std::vector<Direction> directions_;
  std::vector<double> in_val_, out_val_;
  std::vector<std::array<double, 3>> corner_sums_;
};

// Directs every tree edge in linear work. For a non-root bubble with
// separating triangle {vx, vy, vz} and fourth vertex v, the interior sums r
// start from the corner-to-v weights and absorb the matching corner sums of
// the children. Then
//   inVal  = r[vx] + r[vy] + r[vz]
//   outVal = deg(vx) + deg(vy) + deg(vz) - inVal - 2(w(vx,vy) + w(vx,vz) + w(vy,vz))
// and the edge points into the bubble iff inVal > outVal (ties point to the
// parent). Nodes are processed deepest level first so children finish before
// their parents; sibling work is independent.
inline void compute_directions(BubbleTree& tree, const std::vector<double>& weighted_degree,
                               const SimMatrix& s) {
  const int m = tree.size();
  tree.directions_.assign(m, Direction::toward_parent);
  tree.in_val_.assign(m, 0.0);
  tree.out_val_.assign(m, 0.0);
  tree.corner_sums_.assign(m, {0.0, 0.0, 0.0});

  const std::vector<int> order = tree.topological_order();
  std::vector<std::size_t> level_start;
  {
    // order is breadth-first, so levels are contiguous runs.
    std::vector<int> depth(m, 0);
    level_start.push_back(0);
    for (std::size_t k = 1; k < order.size(); ++k) {
      depth[order[k]] = depth[tree.nodes_[order[k]].parent] + 1;
      if (depth[order[k]] != depth[order[k - 1]]) level_start.push_back(k);
    }
    level_start.push_back(order.size());
  }

  auto process = [&](int id) {
    const BubbleNode& node = tree.nodes_[id];
    if (node.is_root()) return;
    const Face& t = node.sep_triangle;
    std::array<double, 3>& r = tree.corner_sums_[id];
    r = {s.w(t.v[0], node.extra), s.w(t.v[1], node.extra), s.w(t.v[2], node.extra)};
    for (int c : node.children) {
      const Face& ct = tree.nodes_[c].sep_triangle;
      const std::array<double, 3>& rc = tree.corner_sums_[c];
      for (int k = 0; k < 3; ++k) {
        for (int a = 0; a < 3; ++a) {
          if (t.v[a] == ct.v[k]) {
            r[a] += rc[k];
            break;
          }
        }
      }
    }
    const double in_val = r[0] + r[1] + r[2];
    const double degree_sum =
        weighted_degree[t.v[0]] + weighted_degree[t.v[1]] + weighted_degree[t.v[2]];
    const double triangle =
        s.w(t.v[0], t.v[1]) + s.w(t.v[0], t.v[2]) + s.w(t.v[1], t.v[2]);
    const double out_val = degree_sum - in_val - 2.0 * triangle;
    tree.in_val_[id] = in_val;
    tree.out_val_[id] = out_val;
    tree.directions_[id] = in_val > out_val ? Direction::toward_child : Direction::toward_parent;
  };

  // Bottom-up over levels; nodes within a level only read finished children.
  for (std::size_t lev = level_start.size() - 1; lev-- > 0;) {
    const std::size_t lo = level_start[lev];
    const std::size_t hi = level_start[lev + 1];
    par::parallel_for(lo, hi, [&](std::size_t k) { process(order[k]); }, 16);
  }
}

}  // namespace pfg
