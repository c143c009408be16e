#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pfg/bubble_tree.hpp"
#include "pfg/error.hpp"
#include "pfg/io.hpp"
#include "pfg/matrix.hpp"
#include "pfg/parallel.hpp"

namespace pfg {

struct WeightedEdge {
  int u = -1, v = -1;  // u < v
  double w = 0.0;
};

struct InsertionRecord {
  int round = -1;
  int vertex = -1;
  Face face{};
  double gain = 0.0;
};

struct PrefixConfig {
  int prefix = 1;
};

// The filtered graph under construction: edges, the face set (faces are slot
// indexed and flagged dead when a vertex is inserted into them), and the
// per-round insertion log.
struct TmfgGraph {
  int n = 0;
  std::vector<WeightedEdge> edges;
  std::vector<Face> faces;      // every face ever created; index = face id
  std::vector<char> face_live;  // parallel to faces
  int live_face_count = 0;
  std::vector<InsertionRecord> insertion_log;

  std::vector<Face> live_faces() const {
    std::vector<Face> out;
    out.reserve(live_face_count);
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (face_live[i]) out.push_back(faces[i]);
    return out;
  }

  double edge_weight_sum() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.w;
    return s;
  }

  std::vector<double> weighted_degrees() const {
    std::vector<double> deg(n, 0.0);
    for (const auto& e : edges) {
      deg[e.u] += e.w;
      deg[e.v] += e.w;
    }
    return deg;
  }

  // "i j w" per edge, i < j, sorted lexicographically.
  std::string edge_list_text() const {
    std::vector<WeightedEdge> sorted = edges;
    std::sort(sorted.begin(), sorted.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::string out;
    for (const auto& e : sorted) {
      out += std::to_string(e.u);
      out += ' ';
      out += std::to_string(e.v);
      out += ' ';
      out += format_g9(e.w);
      out += '\n';
    }
    return out;
  }

  // "round vertex face_corners gain" per insertion, for debugging.
  std::string insertion_log_text() const {
    std::string out;
    for (const auto& rec : insertion_log) {
      out += std::to_string(rec.round);
      out += ' ';
      out += std::to_string(rec.vertex);
      out += ' ';
      out += std::to_string(rec.face.v[0]) + "," + std::to_string(rec.face.v[1]) + "," +
             std::to_string(rec.face.v[2]);
      out += ' ';
      out += format_g9(rec.gain);
      out += '\n';
    }
    return out;
  }
};

struct TmfgResult {
  TmfgGraph graph;
  BubbleTree tree;
};

// Best remaining vertex recorded for one face.
struct GainEntry {
  int best_vertex = -1;
  double gain = -std::numeric_limits<double>::infinity();
};

// Incremental TMFG construction by prefix-batched vertex insertion.
//
// The gain table keeps, per live face, the remaining vertex with the highest
// insertion gain. Each vertex also keeps the list of faces that recorded it as
// best, so a round only rescans the three faces created per insertion plus the
// faces whose recorded best vertex was just inserted.
//
// Tie-breaking is total and deterministic everywhere: higher gain first, then
// lower vertex id, then lexicographically smaller face.
class TmfgBuilder {
public:
  struct Candidate {
    int vertex = -1;
    int face_id = -1;
    double gain = 0.0;
  };

  explicit TmfgBuilder(SimMatrix&&) = delete;  // the matrix must outlive the builder

  explicit TmfgBuilder(const SimMatrix& s) : s_(s) {
    const int n = s.n();
    g_.n = n;

    // Seed: the four vertices with the highest off-diagonal row sums, ties to
    // the lower id. The outer face is the sorted triple of the top three.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<double> sums(n);
    for (int i = 0; i < n; ++i) sums[i] = s.row_sum(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (sums[a] != sums[b]) return sums[a] > sums[b];
      return a < b;
    });

    std::array<int, 4> clique{order[0], order[1], order[2], order[3]};
    std::sort(clique.begin(), clique.end());
    const Face outer = Face::of(order[0], order[1], order[2]);

    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) add_edge(clique[i], clique[j]);
    add_face(Face::of(clique[0], clique[1], clique[2]));
    add_face(Face::of(clique[0], clique[1], clique[3]));
    add_face(Face::of(clique[0], clique[2], clique[3]));
    add_face(Face::of(clique[1], clique[2], clique[3]));

    tree_.init(clique, outer);

    remaining_.reserve(n - 4);
    for (int v = 0; v < n; ++v)
      if (v != clique[0] && v != clique[1] && v != clique[2] && v != clique[3])
        remaining_.push_back(v);

    recorded_by_.assign(n, {});
    std::vector<int> initial{0, 1, 2, 3};
    rescan_faces(initial);
  }

  bool done() const { return remaining_.empty(); }
  int round() const { return round_; }
  const TmfgGraph& graph() const { return g_; }
  const BubbleTree& tree() const { return tree_; }
  const std::vector<int>& remaining() const { return remaining_; }
  const GainEntry& gain_entry(int face_id) const { return gains_[face_id]; }

  double gain_of(int vertex, const Face& face) const {
    return s_.w(face.v[0], vertex) + s_.w(face.v[1], vertex) + s_.w(face.v[2], vertex);
  }

  // Top `prefix` face entries by (gain desc, vertex asc, face lex asc), then
  // conflict resolution: a vertex recorded best for several chosen faces keeps
  // only its highest-gain face. Faces are unique by construction since the
  // gain table holds one entry per face.
  std::vector<Candidate> select_batch(int prefix) const {
    std::vector<Candidate> batch;
    if (remaining_.empty() || prefix < 1) return batch;

    if (prefix == 1) {
      int best = -1;
      for (std::size_t id = 0; id < g_.faces.size(); ++id) {
        if (!g_.face_live[id]) continue;
        if (best < 0 || entry_less(static_cast<int>(id), best)) best = static_cast<int>(id);
      }
      if (best >= 0)
        batch.push_back({gains_[best].best_vertex, best, gains_[best].gain});
      return batch;
    }

    std::vector<int> ids;
    ids.reserve(g_.live_face_count);
    for (std::size_t id = 0; id < g_.faces.size(); ++id)
      if (g_.face_live[id]) ids.push_back(static_cast<int>(id));
    std::sort(ids.begin(), ids.end(), [&](int a, int b) { return entry_less(a, b); });

    const std::size_t take = std::min<std::size_t>(prefix, ids.size());
    std::vector<char> seen(g_.n, 0);
    for (std::size_t k = 0; k < take; ++k) {
      const int id = ids[k];
      const int v = gains_[id].best_vertex;
      if (seen[v]) continue;  // keep the max-gain pair for this vertex
      seen[v] = 1;
      batch.push_back({v, id, gains_[id].gain});
    }
    return batch;
  }

  // Applies a conflict-free batch: per pair, three edges, the target face dies
  // and three new faces are born; the bubble tree gains one node. Insertions
  // are applied in ascending vertex id so face ids and the outer-face chain
  // are reproducible. Gains are then recomputed for the new faces and for
  // faces whose recorded best vertex was inserted this round.
  void insert_batch(const std::vector<Candidate>& batch) {
    if (batch.empty()) return;

    std::vector<Candidate> ordered = batch;
    std::sort(ordered.begin(), ordered.end(),
              [](const Candidate& a, const Candidate& b) { return a.vertex < b.vertex; });

    std::vector<char> in_batch(g_.n, 0);
    for (const auto& c : ordered) {
      if (c.face_id < 0 || c.face_id >= static_cast<int>(g_.faces.size()) || !g_.face_live[c.face_id])
        fail(errc::stale_face, "insert_batch: face id " + std::to_string(c.face_id) + " is not live");
      if (in_batch[c.vertex])
        fail(errc::stale_face, "insert_batch: vertex " + std::to_string(c.vertex) + " appears twice");
      in_batch[c.vertex] = 1;
    }

    // The whole batch leaves the remaining set before gains are recomputed.
    {
      std::size_t out = 0;
      for (std::size_t i = 0; i < remaining_.size(); ++i)
        if (!in_batch[remaining_[i]]) remaining_[out++] = remaining_[i];
      if (remaining_.size() - out != ordered.size())
        fail(errc::stale_face, "insert_batch: batch vertex not in remaining set");
      remaining_.resize(out);
    }

    std::vector<int> affected;
    for (const auto& c : ordered) {
      const Face face = g_.faces[c.face_id];
      add_edge(face.v[0], c.vertex);
      add_edge(face.v[1], c.vertex);
      add_edge(face.v[2], c.vertex);

      g_.face_live[c.face_id] = 0;
      --g_.live_face_count;
      affected.push_back(add_face(Face::of(c.vertex, face.v[0], face.v[1])));
      affected.push_back(add_face(Face::of(c.vertex, face.v[0], face.v[2])));
      affected.push_back(add_face(Face::of(c.vertex, face.v[1], face.v[2])));

      tree_.update(c.vertex, face);
      g_.insertion_log.push_back({round_, c.vertex, face, c.gain});

      for (int id : recorded_by_[c.vertex]) affected.push_back(id);
      recorded_by_[c.vertex].clear();
    }

    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    std::erase_if(affected, [&](int id) { return !g_.face_live[id]; });
    rescan_faces(affected);
    ++round_;
  }

  void run(const PrefixConfig& cfg) {
    if (cfg.prefix < 1) fail(errc::bad_config, "prefix must be >= 1");
    while (!done()) insert_batch(select_batch(cfg.prefix));
  }

  TmfgResult finish() && { return {std::move(g_), std::move(tree_)}; }

private:
  void add_edge(int a, int b) {
    if (a > b) std::swap(a, b);
    g_.edges.push_back({a, b, s_.w(a, b)});
  }

  int add_face(const Face& f) {
    g_.faces.push_back(f);
    g_.face_live.push_back(1);
    ++g_.live_face_count;
    gains_.push_back({});
    return static_cast<int>(g_.faces.size()) - 1;
  }

  // Entry order: gain desc, best vertex asc, face lex asc.
  bool entry_less(int a, int b) const {
    const GainEntry& ea = gains_[a];
    const GainEntry& eb = gains_[b];
    if (ea.gain != eb.gain) return ea.gain > eb.gain;
    if (ea.best_vertex != eb.best_vertex) return ea.best_vertex < eb.best_vertex;
    return g_.faces[a] < g_.faces[b];
  }

  // Recomputes the argmax over the remaining set for each face id; scans are
  // parallel across faces while each face's scan is a plain ascending loop so
  // results do not depend on thread count. Recording lists are appended
  // sequentially afterwards.
  void rescan_faces(const std::vector<int>& ids) {
    par::parallel_for(0, ids.size(), [&](std::size_t k) {
      const Face face = g_.faces[ids[k]];
      GainEntry e;
      for (int v : remaining_) {
        const double gain = gain_of(v, face);
        if (e.best_vertex < 0 || gain > e.gain) e = {v, gain};
      }
      gains_[ids[k]] = e;
    }, 1);
    for (int id : ids)
      if (gains_[id].best_vertex >= 0) recorded_by_[gains_[id].best_vertex].push_back(id);
  }

  const SimMatrix& s_;
  TmfgGraph g_;
  BubbleTree tree_;
  std::vector<GainEntry> gains_;            // by face id
  std::vector<std::vector<int>> recorded_by_;  // vertex -> face ids recorded as best
  std::vector<int> remaining_;              // ascending
  int round_ = 0;
};

inline TmfgResult build_tmfg(const SimMatrix& s, const PrefixConfig& cfg = {}) {
  TmfgBuilder builder(s);
  builder.run(cfg);
  return std::move(builder).finish();
}

// Export of the tree for debugging: "id vertices parent sep_triangle direction".
inline std::string bubble_tree_text(const BubbleTree& tree) {
  std::string out;
  for (const auto& node : tree.nodes()) {
    out += std::to_string(node.id);
    out += ' ';
    for (int i = 0; i < 4; ++i) {
      if (i) out += ',';
      out += std::to_string(node.vertices[i]);
    }
    out += ' ';
    out += node.is_root() ? "-" : std::to_string(node.parent);
    out += ' ';
    if (node.is_root()) {
      out += "-";
    } else {
      out += std::to_string(node.sep_triangle.v[0]) + "," + std::to_string(node.sep_triangle.v[1]) +
             "," + std::to_string(node.sep_triangle.v[2]);
    }
    out += ' ';
    if (!tree.has_directions() || node.is_root())
      out += "-";
    else
      out += tree.direction(node.id) == Direction::toward_child ? "in" : "out";
    out += '\n';
  }
  return out;
}

}  // namespace pfg
