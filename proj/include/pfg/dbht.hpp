#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "pfg/bubble_tree.hpp"
#include "pfg/error.hpp"
#include "pfg/matrix.hpp"
#include "pfg/parallel.hpp"
#include "pfg/tmfg.hpp"

namespace pfg {

// All-pairs shortest path distances, dense n x n.
class Apsp {
public:
  Apsp(int n, std::vector<double> dist) : n_(n), dist_(std::move(dist)) {}

  int n() const { return n_; }
  double at(int u, int v) const {
    return dist_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + v];
  }

private:
  int n_ = 0;
  std::vector<double> dist_;
};

// Dijkstra from every source over an undirected edge list, sources in
// parallel. Exact for nonnegative weights.
inline Apsp all_pairs_shortest_paths(int n, const std::vector<WeightedEdge>& edges) {
  for (const auto& e : edges)
    if (e.w < 0.0)
      fail(errc::negative_weight, "shortest paths need nonnegative weights, got " + std::to_string(e.w));

  std::vector<int> offset(n + 1, 0);
  for (const auto& e : edges) {
    ++offset[e.u + 1];
    ++offset[e.v + 1];
  }
  for (int i = 0; i < n; ++i) offset[i + 1] += offset[i];
  std::vector<std::pair<int, double>> adj(edges.size() * 2);
  {
    std::vector<int> cursor(offset.begin(), offset.end() - 1);
    for (const auto& e : edges) {
      adj[cursor[e.u]++] = {e.v, e.w};
      adj[cursor[e.v]++] = {e.u, e.w};
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kInf);

  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t s) {
    double* row = dist.data() + s * static_cast<std::size_t>(n);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    row[s] = 0.0;
    heap.push({0.0, static_cast<int>(s)});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > row[u]) continue;
      for (int k = offset[u]; k < offset[u + 1]; ++k) {
        const auto& [v, w] = adj[k];
        const double nd = d + w;
        if (nd < row[v]) {
          row[v] = nd;
          heap.push({nd, v});
        }
      }
    }
  }, 1);

  // Independent sources accumulate path sums in opposite orders, which can
  // leave dist[i][j] and dist[j][i] a few ulps apart. Mirror the upper
  // triangle so the matrix is exactly symmetric.
  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(n); ++j)
      dist[j * n + i] = dist[i * n + j];
  }, 64);
  return Apsp(n, std::move(dist));
}

// TMFG edges weighted by the dissimilarity measure.
inline Apsp all_pairs_shortest_paths(const TmfgGraph& g, const DisMatrix& dis) {
  std::vector<WeightedEdge> weighted;
  weighted.reserve(g.edges.size());
  for (const auto& e : g.edges) weighted.push_back({e.u, e.v, dis.d(e.u, e.v)});
  return all_pairs_shortest_paths(g.n, weighted);
}

// Bubbles with only incoming edges; the centers of local clusters.
inline std::vector<int> converging_bubbles(const BubbleTree& tree) {
  if (!tree.has_directions())
    fail(errc::bad_config, "bubble tree edges are not directed yet; run compute_directions first");
  std::vector<int> out;
  for (int id = 0; id < tree.size(); ++id)
    if (tree.out_degree(id) == 0) out.push_back(id);
  return out;
}

// For each bubble, the converging bubbles reachable by following edge
// directions in the tree.
struct Reachability {
  std::vector<std::vector<int>> reach;  // per bubble, sorted converging ids
};

inline Reachability reachable_converging(const BubbleTree& tree) {
  const int m = tree.size();
  std::vector<char> converging(m, 0);
  for (int id : converging_bubbles(tree)) converging[id] = 1;

  Reachability result;
  result.reach.assign(m, {});
  par::parallel_for(0, static_cast<std::size_t>(m), [&](std::size_t start) {
    std::vector<char> visited(m, 0);
    std::vector<int> stack{static_cast<int>(start)};
    visited[start] = 1;
    std::vector<int> found;
    while (!stack.empty()) {
      const int b = stack.back();
      stack.pop_back();
      if (converging[b]) found.push_back(b);
      const BubbleNode& node = tree.node(b);
      if (!node.is_root() && tree.direction(b) == Direction::toward_parent && !visited[node.parent]) {
        visited[node.parent] = 1;
        stack.push_back(node.parent);
      }
      for (int c : node.children) {
        if (tree.direction(c) == Direction::toward_child && !visited[c]) {
          visited[c] = 1;
          stack.push_back(c);
        }
      }
    }
    std::sort(found.begin(), found.end());
    result.reach[start] = std::move(found);
  }, 4);
  return result;
}

// Vertex-to-bubble memberships, each list ascending.
inline std::vector<std::vector<int>> bubble_memberships(const BubbleTree& tree, int n) {
  std::vector<std::vector<int>> member(n);
  for (int id = 0; id < tree.size(); ++id)
    for (int v : tree.node(id).vertices) member[v].push_back(id);
  return member;
}

struct Assignment {
  std::vector<int> group;             // converging bubble id per vertex
  std::vector<double> group_score;    // chi for stage 1, L-bar for stage 2
  std::vector<std::uint8_t> group_stage;  // 1 or 2
  std::vector<int> bubble;            // bubble id per vertex
  std::vector<double> bubble_score;   // chi'
  std::vector<std::vector<int>> v0;   // per bubble id: stage-1 vertices assigned to it

  std::string text() const {
    std::string out;
    for (std::size_t v = 0; v < group.size(); ++v)
      out += std::to_string(v) + " " + std::to_string(group[v]) + " " + std::to_string(bubble[v]) + "\n";
    return out;
  }
};

// Stage 1: every vertex inside a converging bubble takes the converging bubble
// maximizing chi(v,b) = sum of w(u,v) over the bubble's other vertices (every
// TMFG bubble has 6 edges, so no per-bubble normalizer). Stage 2: the rest
// take the reachable converging bubble minimizing the mean shortest-path
// distance to its stage-1 vertex set V0. Ties break to the lower bubble id.
inline Assignment assign_groups(const BubbleTree& tree, const SimMatrix& s, const Apsp& apsp,
                                const Reachability& reach) {
  const int n = s.n();
  const int m = tree.size();
  std::vector<char> converging(m, 0);
  const std::vector<int> cvg = converging_bubbles(tree);
  if (cvg.empty()) fail(errc::unassignable, "no converging bubble");
  for (int id : cvg) converging[id] = 1;

  const auto member = bubble_memberships(tree, n);

  Assignment a;
  a.group.assign(n, -1);
  a.group_score.assign(n, 0.0);
  a.group_stage.assign(n, 0);
  a.bubble.assign(n, -1);
  a.bubble_score.assign(n, 0.0);
  a.v0.assign(m, {});

  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t vi) {
    const int v = static_cast<int>(vi);
    int best = -1;
    double best_chi = 0.0;
    for (int b : member[v]) {
      if (!converging[b]) continue;
      double chi = 0.0;
      for (int u : tree.node(b).vertices)
        if (u != v) chi += s.w(u, v);
      if (best < 0 || chi > best_chi) {
        best = b;
        best_chi = chi;
      }
    }
    if (best >= 0) {
      a.group[v] = best;
      a.group_score[v] = best_chi;
      a.group_stage[v] = 1;
    }
  }, 64);

  // V0 per converging bubble via a counting sort of vertices by group.
  {
    std::vector<int> count(m, 0);
    for (int v = 0; v < n; ++v)
      if (a.group_stage[v] == 1) ++count[a.group[v]];
    for (int b = 0; b < m; ++b) a.v0[b].reserve(count[b]);
    for (int v = 0; v < n; ++v)
      if (a.group_stage[v] == 1) a.v0[a.group[v]].push_back(v);
  }

  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t vi) {
    const int v = static_cast<int>(vi);
    if (a.group_stage[v] == 1) return;
    // candidates: converging bubbles reachable from any bubble containing v
    std::vector<int> candidates;
    for (int b : member[v])
      for (int c : reach.reach[b]) candidates.push_back(c);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    int best = -1;
    double best_mean = 0.0;
    for (int c : candidates) {
      if (a.v0[c].empty()) continue;
      double sum = 0.0;
      for (int u : a.v0[c]) sum += apsp.at(u, v);
      const double mean = sum / static_cast<double>(a.v0[c].size());
      if (best < 0 || mean < best_mean) {
        best = c;
        best_mean = mean;
      }
    }
    if (best < 0)
      fail(errc::unassignable,
           "vertex " + std::to_string(v) + " reaches no converging bubble with assigned vertices");
    a.group[v] = best;
    a.group_score[v] = best_mean;
    a.group_stage[v] = 2;
  }, 64);

  return a;
}

// Every vertex (stage-1 vertices included) takes the containing bubble with
// maximal chi'(v,b) = sum_{u in b} w(u,v) / sum over the bubble's 6 edges.
// Ties break to the lower bubble id.
inline void assign_bubbles(const BubbleTree& tree, const SimMatrix& s, Assignment& a) {
  const int n = static_cast<int>(a.group.size());
  const int m = tree.size();
  const auto member = bubble_memberships(tree, n);

  std::vector<double> denom(m, 0.0);
  for (int b = 0; b < m; ++b) {
    const auto& verts = tree.node(b).vertices;
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) sum += s.w(verts[i], verts[j]);
    denom[b] = sum;
  }

  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t vi) {
    const int v = static_cast<int>(vi);
    int best = -1;
    double best_score = 0.0;
    for (int b : member[v]) {
      double attach = 0.0;
      for (int u : tree.node(b).vertices)
        if (u != v) attach += s.w(u, v);
      const double score = attach / denom[b];
      if (best < 0 || score > best_score) {
        best = b;
        best_score = score;
      }
    }
    a.bubble[v] = best;
    a.bubble_score[v] = best_score;
  }, 64);
}

// A subgroup is a group's slice living in one bubble.
struct Subgroup {
  int group = -1;
  int bubble = -1;
  std::vector<int> vertices;  // ascending
};

inline std::vector<Subgroup> subgroups(const Assignment& a) {
  std::vector<Subgroup> out;
  const int n = static_cast<int>(a.group.size());
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (a.group[x] != a.group[y]) return a.group[x] < a.group[y];
    if (a.bubble[x] != a.bubble[y]) return a.bubble[x] < a.bubble[y];
    return x < y;
  });
  for (int v : order) {
    if (out.empty() || out.back().group != a.group[v] || out.back().bubble != a.bubble[v])
      out.push_back({a.group[v], a.bubble[v], {}});
    out.back().vertices.push_back(v);
  }
  return out;
}

// Full assignment pass: directions must already be computed on the tree.
inline Assignment dbht_assign(const BubbleTree& tree, const SimMatrix& s, const Apsp& apsp) {
  const Reachability reach = reachable_converging(tree);
  Assignment a = assign_groups(tree, s, apsp, reach);
  assign_bubbles(tree, s, a);
  return a;
}

}  // namespace pfg
