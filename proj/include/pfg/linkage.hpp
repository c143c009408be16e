#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pfg/dbht.hpp"
#include "pfg/error.hpp"
#include "pfg/io.hpp"
#include "pfg/parallel.hpp"

namespace pfg {

enum class MergeLevel : std::uint8_t { intra, inter_bubble, inter_group };

struct DendroNode {
  int id = -1;
  int left = -1, right = -1, parent = -1;  // children are -1 for leaves
  int size = 1;
  double merge_distance = 0.0;  // complete-linkage distance at merge time
  double height = 0.0;          // re-assigned height
  MergeLevel level = MergeLevel::intra;
  int group = -1;   // owning converging bubble for intra / inter_bubble nodes
  int bubble = -1;  // owning bubble for intra nodes

  bool is_leaf() const { return left < 0; }
};

// 2n-1 nodes: leaves 0..n-1, internal nodes n..2n-2 in merge order.
struct Dendrogram {
  int n = 0;
  std::vector<DendroNode> nodes;
  int root = -1;
};

namespace linkage_detail {

// Total order for merge selection: distance, then the smaller and larger
// minimum leaf id of the two clusters. Cluster min-leaf ids are unique, so the
// order is total and the greedy merge sequence is deterministic.
struct PairKey {
  double dist = 0.0;
  int lo = -1, hi = -1;

  bool operator<(const PairKey& o) const {
    if (dist != o.dist) return dist < o.dist;
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
  }
};

inline PairKey pair_key(double dist, int ml_a, int ml_b) {
  return {dist, std::min(ml_a, ml_b), std::max(ml_a, ml_b)};
}

}  // namespace linkage_detail

// Exact greedy complete linkage over k items. `d` holds the k*k symmetric
// distance matrix and is consumed; `minleaf` carries per-item tie keys.
// merge(a, b, dist) fires k-1 times with slot indices a < b; the merged
// cluster continues in slot a. Cluster distances follow the max rule, so the
// Lance-Williams update is arithmetic-exact. A per-row nearest cache avoids
// rescanning the full matrix on every step.
template <class OnMerge>
void complete_linkage_run(int k, std::vector<double>& d, std::vector<int> minleaf, OnMerge&& merge) {
  using linkage_detail::PairKey;
  using linkage_detail::pair_key;
  if (k <= 1) return;

  auto dist = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(i) * k + j]; };
  std::vector<char> active(k, 1);
  std::vector<int> nearest(k, -1);
  std::vector<PairKey> nearest_key(k);

  auto rescan = [&](int i) {
    nearest[i] = -1;
    for (int j = 0; j < k; ++j) {
      if (j == i || !active[j]) continue;
      const PairKey key = pair_key(dist(i, j), minleaf[i], minleaf[j]);
      if (nearest[i] < 0 || key < nearest_key[i]) {
        nearest[i] = j;
        nearest_key[i] = key;
      }
    }
  };
  for (int i = 0; i < k; ++i) rescan(i);

  for (int step = 0; step < k - 1; ++step) {
    int best = -1;
    for (int i = 0; i < k; ++i) {
      if (!active[i] || nearest[i] < 0) continue;
      if (best < 0 || nearest_key[i] < nearest_key[best]) best = i;
    }
    int a = best, b = nearest[best];
    if (a > b) std::swap(a, b);
    merge(a, b, dist(a, b));

    active[b] = 0;
    minleaf[a] = std::min(minleaf[a], minleaf[b]);
    for (int m = 0; m < k; ++m) {
      if (!active[m] || m == a) continue;
      const double nd = std::max(dist(m, a), dist(m, b));
      dist(m, a) = nd;
      dist(a, m) = nd;
    }
    rescan(a);
    for (int m = 0; m < k; ++m) {
      if (!active[m] || m == a) continue;
      if (nearest[m] == a || nearest[m] == b) {
        rescan(m);
        continue;
      }
      // Only distances to the merged slot changed; its minleaf may have
      // dropped as well, so re-offer the (m, a) pair to the cache.
      const PairKey cand = pair_key(dist(m, a), minleaf[m], minleaf[a]);
      if (cand < nearest_key[m]) {
        nearest[m] = a;
        nearest_key[m] = cand;
      }
    }
  }
}

namespace linkage_detail {

// Shared state for one linkage run over existing dendrogram roots.
struct RunItems {
  std::vector<int> roots;                  // dendrogram node ids
  std::vector<std::vector<int>> leaves;    // leaf vertex lists per item
};

// Complete-linkage distance between leaf sets: max pairwise shortest-path
// distance.
inline double set_distance(const std::vector<int>& a, const std::vector<int>& b, const Apsp& apsp) {
  double best = -std::numeric_limits<double>::infinity();
  for (int u : a)
    for (int v : b) best = std::max(best, apsp.at(u, v));
  return best;
}

// Runs one linkage pass over the items, writing merge nodes into the
// preallocated id block starting at `base`. Returns the root node id.
inline int run_level(Dendrogram& dendro, const RunItems& items, const Apsp& apsp, int base,
                     MergeLevel level, int group, int bubble) {
  const int k = static_cast<int>(items.roots.size());
  if (k == 1) return items.roots[0];

  std::vector<double> d(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double v = set_distance(items.leaves[i], items.leaves[j], apsp);
      d[static_cast<std::size_t>(i) * k + j] = v;
      d[static_cast<std::size_t>(j) * k + i] = v;
    }

  std::vector<int> minleaf(k);
  std::vector<int> slot_node(k);
  for (int i = 0; i < k; ++i) {
    minleaf[i] = *std::min_element(items.leaves[i].begin(), items.leaves[i].end());
    slot_node[i] = items.roots[i];
  }

  int next_id = base;
  complete_linkage_run(k, d, minleaf, [&](int a, int b, double md) {
    DendroNode& node = dendro.nodes[next_id];
    node.id = next_id;
    node.left = slot_node[a];
    node.right = slot_node[b];
    node.merge_distance = md;
    node.size = dendro.nodes[node.left].size + dendro.nodes[node.right].size;
    node.level = level;
    node.group = group;
    node.bubble = bubble;
    dendro.nodes[node.left].parent = next_id;
    dendro.nodes[node.right].parent = next_id;
    slot_node[a] = next_id;
    ++next_id;
  });
  return next_id - 1;
}

}  // namespace linkage_detail

// Three-level hierarchy: complete linkage inside every subgroup, then across
// each group's subgroup roots, then across group roots. Internal node ids are
// preallocated per run (all intra blocks first, then inter-bubble blocks, then
// the inter-group block), so parallel subgroup runs produce identical ids.
inline Dendrogram build_hierarchy(const Assignment& a, const Apsp& apsp) {
  const int n = static_cast<int>(a.group.size());
  Dendrogram dendro;
  dendro.n = n;
  dendro.nodes.resize(2 * n - 1);
  for (int v = 0; v < n; ++v) {
    DendroNode& leaf = dendro.nodes[v];
    leaf.id = v;
    leaf.size = 1;
    leaf.height = 0.0;
    leaf.group = a.group[v];
    leaf.bubble = a.bubble[v];
  }

  const std::vector<Subgroup> sgs = subgroups(a);
  const int sg_count = static_cast<int>(sgs.size());

  // Distinct groups in ascending id order, with their subgroup ranges.
  struct GroupRange {
    int group = -1;
    int first = -1, last = -1;  // subgroup index range [first, last)
    int base = -1;              // inter-bubble id block
    int root = -1;
    std::vector<int> vertices;
  };
  std::vector<GroupRange> groups;
  for (int i = 0; i < sg_count; ++i) {
    if (groups.empty() || groups.back().group != sgs[i].group)
      groups.push_back({sgs[i].group, i, i, -1, -1, {}});
    groups.back().last = i + 1;
    for (int v : sgs[i].vertices) groups.back().vertices.push_back(v);
  }

  // Id blocks: intra merges per subgroup, then inter-bubble merges per group,
  // then inter-group merges.
  std::vector<int> sg_base(sg_count);
  int next = n;
  for (int i = 0; i < sg_count; ++i) {
    sg_base[i] = next;
    next += static_cast<int>(sgs[i].vertices.size()) - 1;
  }
  for (auto& g : groups) {
    g.base = next;
    next += (g.last - g.first) - 1;
  }
  const int inter_group_base = next;

  // Level 1: intra-bubble runs, parallel across subgroups.
  std::vector<int> sg_root(sg_count, -1);
  par::parallel_for(0, static_cast<std::size_t>(sg_count), [&](std::size_t i) {
    const Subgroup& sg = sgs[i];
    linkage_detail::RunItems items;
    items.roots.reserve(sg.vertices.size());
    items.leaves.reserve(sg.vertices.size());
    for (int v : sg.vertices) {
      items.roots.push_back(v);
      items.leaves.push_back({v});
    }
    sg_root[i] = linkage_detail::run_level(dendro, items, apsp, sg_base[i], MergeLevel::intra,
                                           sg.group, sg.bubble);
  }, 1);

  // Level 2: per group over its subgroup roots, parallel across groups.
  par::parallel_for(0, groups.size(), [&](std::size_t gi) {
    GroupRange& g = groups[gi];
    linkage_detail::RunItems items;
    for (int i = g.first; i < g.last; ++i) {
      items.roots.push_back(sg_root[i]);
      items.leaves.push_back(sgs[i].vertices);
    }
    g.root = linkage_detail::run_level(dendro, items, apsp, g.base, MergeLevel::inter_bubble,
                                       g.group, -1);
  }, 1);

  // Level 3: across group roots.
  {
    linkage_detail::RunItems items;
    for (const auto& g : groups) {
      items.roots.push_back(g.root);
      items.leaves.push_back(g.vertices);
    }
    dendro.root = linkage_detail::run_level(dendro, items, apsp, inter_group_base,
                                            MergeLevel::inter_group, -1, -1);
  }
  return dendro;
}

// Height re-assignment. Inter-group nodes take the number of converging
// bubbles among their descendants. Each group's n_b - 1 intra/inter-bubble
// nodes take the sequence 1/(n_b-1), ..., 1/2, 1 after sorting intra nodes
// (by bubble, then merge distance) ahead of inter-bubble nodes (by merge
// distance); the group root lands on height 1.
inline void assign_heights(Dendrogram& d, const Assignment& a) {
  const int n = d.n;
  std::vector<int> group_ids;
  for (int v = 0; v < n; ++v) group_ids.push_back(a.group[v]);
  std::sort(group_ids.begin(), group_ids.end());
  group_ids.erase(std::unique(group_ids.begin(), group_ids.end()), group_ids.end());

  std::vector<int> group_size;
  for (int g : group_ids)
    group_size.push_back(static_cast<int>(std::count(a.group.begin(), a.group.end(), g)));

  for (std::size_t gi = 0; gi < group_ids.size(); ++gi) {
    const int g = group_ids[gi];
    const int nb = group_size[gi];
    std::vector<int> ids;
    for (int id = n; id < 2 * n - 1; ++id) {
      const DendroNode& node = d.nodes[id];
      if (node.level != MergeLevel::inter_group && node.group == g) ids.push_back(id);
    }
    if (static_cast<int>(ids.size()) != nb - 1)
      fail(errc::monotonicity, "group " + std::to_string(g) + " has " + std::to_string(ids.size()) +
                                   " internal nodes, expected " + std::to_string(nb - 1));
    std::sort(ids.begin(), ids.end(), [&](int x, int y) {
      const DendroNode& nx = d.nodes[x];
      const DendroNode& ny = d.nodes[y];
      const bool ix = nx.level == MergeLevel::intra;
      const bool iy = ny.level == MergeLevel::intra;
      if (ix != iy) return ix;  // intra first
      if (ix) {
        if (nx.bubble != ny.bubble) return nx.bubble < ny.bubble;
        if (nx.merge_distance != ny.merge_distance) return nx.merge_distance < ny.merge_distance;
        return x < y;
      }
      if (nx.merge_distance != ny.merge_distance) return nx.merge_distance < ny.merge_distance;
      return x < y;
    });
    for (std::size_t k = 0; k < ids.size(); ++k)
      d.nodes[ids[k]].height = 1.0 / static_cast<double>(nb - 1 - static_cast<int>(k));
  }

  // Inter-group heights: children created earlier, so ascending id order works.
  std::vector<int> cvg_count(2 * n - 1, 0);
  for (int id = n; id < 2 * n - 1; ++id) {
    DendroNode& node = d.nodes[id];
    if (node.level != MergeLevel::inter_group) continue;
    const auto child_count = [&](int c) {
      return d.nodes[c].level == MergeLevel::inter_group ? cvg_count[c] : 1;
    };
    cvg_count[id] = child_count(node.left) + child_count(node.right);
    node.height = static_cast<double>(cvg_count[id]);
  }

  for (int id = n; id < 2 * n - 1; ++id) {
    const DendroNode& node = d.nodes[id];
    if (d.nodes[node.left].height > node.height || d.nodes[node.right].height > node.height)
      fail(errc::monotonicity, "dendrogram heights not monotone at node " + std::to_string(id));
  }
}

// Removes the k-1 highest internal nodes (ties: later merges first) and labels
// the leaf components 0..k-1 in order of their smallest vertex.
inline std::vector<int> cut(const Dendrogram& d, int k) {
  const int n = d.n;
  if (k < 1 || k > n) fail(errc::bad_config, "cut k must be in [1, n]");

  std::vector<int> internal;
  for (int id = n; id < 2 * n - 1; ++id) internal.push_back(id);
  std::sort(internal.begin(), internal.end(), [&](int x, int y) {
    if (d.nodes[x].height != d.nodes[y].height) return d.nodes[x].height > d.nodes[y].height;
    return x > y;
  });

  std::vector<char> removed(2 * n - 1, 0);
  for (int i = 0; i < k - 1; ++i) removed[internal[i]] = 1;

  // Cluster roots are the surviving nodes whose parent was removed (or the
  // root itself); their leaf sets become the clusters, numbered by smallest
  // member.
  std::vector<std::pair<int, std::vector<int>>> clusters;  // (min leaf, members)
  for (int id = 0; id < 2 * n - 1; ++id) {
    if (removed[id]) continue;
    const int parent = d.nodes[id].parent;
    if (id != d.root && !(parent >= 0 && removed[parent])) continue;
    int min_leaf = n;
    std::vector<int> members;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (d.nodes[x].is_leaf()) {
        members.push_back(x);
        min_leaf = std::min(min_leaf, x);
      } else {
        stack.push_back(d.nodes[x].left);
        stack.push_back(d.nodes[x].right);
      }
    }
    clusters.push_back({min_leaf, std::move(members)});
  }
  std::sort(clusters.begin(), clusters.end());

  std::vector<int> labels(n, -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int v : clusters[c].second) labels[v] = static_cast<int>(c);
  return labels;
}

// ---- exports ----

// n-1 lines "left right height size"; leaves 0..n-1, internal ids n..2n-2.
inline std::string linkage_matrix_text(const Dendrogram& d) {
  std::string out;
  for (int id = d.n; id < 2 * d.n - 1; ++id) {
    const DendroNode& node = d.nodes[id];
    out += std::to_string(node.left);
    out += ' ';
    out += std::to_string(node.right);
    out += ' ';
    out += format_g9(node.height);
    out += ' ';
    out += std::to_string(node.size);
    out += '\n';
  }
  return out;
}

// Nested JSON with ids, heights, sizes. Children are ordered left, right.
inline std::string dendrogram_json(const Dendrogram& d) {
  std::vector<std::string> body(d.nodes.size());
  for (int id = 0; id < 2 * d.n - 1; ++id) {
    const DendroNode& node = d.nodes[id];
    std::string s = "{\"id\":" + std::to_string(id) + ",\"height\":" + format_g9(node.height);
    if (!node.is_leaf()) {
      s += ",\"size\":" + std::to_string(node.size);
      s += ",\"children\":[" + body[node.left] + "," + body[node.right] + "]";
    }
    s += "}";
    body[id] = std::move(s);
  }
  return "{\"n\":" + std::to_string(d.n) + ",\"root\":" + body[d.root] + "}\n";
}

// Newick with branch lengths = parent height - child height.
inline std::string dendrogram_newick(const Dendrogram& d) {
  std::vector<std::string> body(d.nodes.size());
  for (int id = 0; id < 2 * d.n - 1; ++id) {
    const DendroNode& node = d.nodes[id];
    if (node.is_leaf()) {
      body[id] = std::to_string(id);
    } else {
      const double h = node.height;
      body[id] = "(" + body[node.left] + ":" + format_g9(h - d.nodes[node.left].height) + "," +
                 body[node.right] + ":" + format_g9(h - d.nodes[node.right].height) + ")";
    }
  }
  return body[d.root] + ";\n";
}

}  // namespace pfg
