#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "pfg/metrics.hpp"
#include "pfg/parallel.hpp"
#include "pfg/tmfg.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pfg;

namespace {

SimMatrix uniform_similarity(int n, double w) {
  SquareMatrix m(n, w);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return SimMatrix::from_matrix(std::move(m));
}

std::set<int> seed_vertices(const TmfgGraph& g) {
  std::set<int> inserted;
  for (const auto& rec : g.insertion_log) inserted.insert(rec.vertex);
  std::set<int> seed;
  for (int v = 0; v < g.n; ++v)
    if (!inserted.count(v)) seed.insert(v);
  return seed;
}

}  // namespace

TEST_CASE("n = 4 gives K4 with no insertions") {
  const TmfgResult r = build_tmfg(uniform_similarity(4, 0.5), {1});
  CHECK(r.graph.edges.size() == 6);
  CHECK(r.graph.live_face_count == 4);
  CHECK(r.graph.insertion_log.empty());
  CHECK(r.tree.size() == 1);
}

TEST_CASE("seed excludes a weakly connected vertex") {
  SquareMatrix m(5, 0.5);
  for (int i = 0; i < 5; ++i) m(i, i) = 1.0;
  for (int j = 0; j < 5; ++j)
    if (j != 2) m(2, j) = m(j, 2) = 0.01;
  const SimMatrix s = SimMatrix::from_matrix(std::move(m));
  TmfgBuilder builder(s);
  CHECK(builder.remaining() == std::vector<int>{2});
}

TEST_CASE("golden fixture: seed clique and insertion order") {
  const SimMatrix s = fixtures::small_similarity();

  for (int prefix : {1, 2}) {
    const TmfgResult r = build_tmfg(s, {prefix});
    CAPTURE(prefix);
    CHECK(seed_vertices(r.graph) == std::set<int>{0, 1, 2, 4});
    REQUIRE(r.graph.insertion_log.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.graph.insertion_log[i].vertex == fixtures::kExpectedInsertions[i].first);
      CHECK(r.graph.insertion_log[i].face == fixtures::kExpectedInsertions[i].second);
    }
    CHECK(r.graph.edges.size() == 3 * 7 - 6);
    CHECK(r.graph.live_face_count == 2 * 7 - 4);
  }
}

TEST_CASE("insertion gain is the sum of the three new edge weights") {
  const SimMatrix s = fixtures::small_similarity();
  const TmfgResult r = build_tmfg(s, {1});
  for (const auto& rec : r.graph.insertion_log) {
    const double expected =
        s.w(rec.face.v[0], rec.vertex) + s.w(rec.face.v[1], rec.vertex) + s.w(rec.face.v[2], rec.vertex);
    CHECK(rec.gain == expected);
  }
  // vertex 3 into {0,1,2}: gain w(0,3)+w(1,3)+w(2,3) = 0.4+0.8+0.4
  CHECK(r.graph.insertion_log[0].gain == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("face count grows by net two per insertion") {
  const SimMatrix s = oracle::random_similarity(12, 7);
  TmfgBuilder builder(s);
  int inserted = 0;
  while (!builder.done()) {
    const auto batch = builder.select_batch(3);
    builder.insert_batch(batch);
    inserted += static_cast<int>(batch.size());
    CHECK(builder.graph().live_face_count == 4 + 2 * inserted);
  }
}

TEST_CASE("select_batch with prefix 1 is the global argmax pair") {
  const SimMatrix s = oracle::random_similarity(10, 31);
  TmfgBuilder builder(s);
  while (!builder.done()) {
    const auto batch = builder.select_batch(1);
    REQUIRE(batch.size() == 1);
    // brute force: best (face, vertex) by gain desc, vertex asc, face lex asc
    double best_gain = 0.0;
    int best_vertex = -1;
    Face best_face{};
    for (std::size_t id = 0; id < builder.graph().faces.size(); ++id) {
      if (!builder.graph().face_live[id]) continue;
      const Face& face = builder.graph().faces[id];
      for (int v : builder.remaining()) {
        const double gain = builder.gain_of(v, face);
        bool better = best_vertex < 0 || gain > best_gain;
        if (!better && gain == best_gain) {
          if (v < best_vertex) better = true;
          else if (v == best_vertex && face < best_face) better = true;
        }
        if (better) {
          best_gain = gain;
          best_vertex = v;
          best_face = face;
        }
      }
    }
    CHECK(batch[0].vertex == best_vertex);
    CHECK(builder.graph().faces[batch[0].face_id] == best_face);
    CHECK(batch[0].gain == best_gain);
    builder.insert_batch(batch);
  }
}

TEST_CASE("gain table keeps the higher-gain vertex when two compete for a face") {
  // vertices 4 and 5 both want face {0,1,2}; 4 wins on gain
  SquareMatrix m(6, 0.1);
  for (int i = 0; i < 6; ++i) m(i, i) = 1.0;
  auto set = [&](int a, int b, double w) { m(a, b) = m(b, a) = w; };
  set(0, 1, 0.9);
  set(0, 2, 0.9);
  set(1, 2, 0.9);
  set(0, 3, 0.9);
  set(1, 3, 0.9);
  set(2, 3, 0.9);
  set(0, 4, 0.8);
  set(1, 4, 0.8);
  set(2, 4, 0.8);
  set(0, 5, 0.7);
  set(1, 5, 0.7);
  set(2, 5, 0.7);
  const SimMatrix s = SimMatrix::from_matrix(std::move(m));
  TmfgBuilder builder(s);
  REQUIRE((builder.remaining() == std::vector<int>{4, 5}));
  bool found = false;
  for (std::size_t id = 0; id < builder.graph().faces.size(); ++id) {
    if (builder.graph().faces[id] == Face::of(0, 1, 2)) {
      CHECK(builder.gain_entry(static_cast<int>(id)).best_vertex == 4);
      CHECK(builder.gain_entry(static_cast<int>(id)).gain == doctest::Approx(2.4));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("prefix larger than candidate count takes all conflict-free pairs") {
  // 6 vertices: 2 remaining after the seed; give each its own best face
  SquareMatrix m(6, 0.1);
  for (int i = 0; i < 6; ++i) m(i, i) = 1.0;
  auto set = [&](int a, int b, double w) { m(a, b) = m(b, a) = w; };
  // seed = {0,1,2,3}
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) set(i, j, 0.9);
  // vertex 4 loves {0,1,2}, vertex 5 loves {1,2,3}
  set(0, 4, 0.8);
  set(1, 4, 0.8);
  set(2, 4, 0.8);
  set(1, 5, 0.7);
  set(2, 5, 0.7);
  set(3, 5, 0.7);
  const SimMatrix s = SimMatrix::from_matrix(std::move(m));
  TmfgBuilder builder(s);
  const auto batch = builder.select_batch(50);
  REQUIRE(batch.size() == 2);
  CHECK(batch[0].vertex == 4);
  CHECK(builder.graph().faces[batch[0].face_id] == Face::of(0, 1, 2));
  CHECK(batch[1].vertex == 5);
  CHECK(builder.graph().faces[batch[1].face_id] == Face::of(1, 2, 3));
  builder.insert_batch(batch);
  CHECK(builder.done());
  CHECK(builder.graph().insertion_log[0].round == 0);
  CHECK(builder.graph().insertion_log[1].round == 0);
}

TEST_CASE("prefix 1 matches the sequential oracle") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const SimMatrix s = oracle::random_similarity(16, seed);
    const TmfgResult r = build_tmfg(s, {1});
    const oracle::SeqTmfg expected = oracle::sequential_tmfg(s);
    CHECK(oracle::edge_set(r.graph) == expected.edges);
    REQUIRE(r.graph.insertion_log.size() == expected.insertions.size());
    for (std::size_t i = 0; i < expected.insertions.size(); ++i) {
      CHECK(r.graph.insertion_log[i].vertex == expected.insertions[i].first);
      CHECK(r.graph.insertion_log[i].face == expected.insertions[i].second);
    }
  }
}

TEST_CASE("maximal planar counts hold for any prefix") {
  for (int n : {4, 5, 9, 16, 33}) {
    for (int prefix : {1, 2, 5, 100}) {
      const SimMatrix s = oracle::random_similarity(n, 1000 + n * 7 + prefix);
      const TmfgResult r = build_tmfg(s, {prefix});
      CAPTURE(n);
      CAPTURE(prefix);
      CHECK(static_cast<int>(r.graph.edges.size()) == 3 * n - 6);
      CHECK(r.graph.live_face_count == 2 * n - 4);
      CHECK(static_cast<int>(r.graph.insertion_log.size()) == n - 4);
      // every inserted vertex appears exactly once
      CHECK(seed_vertices(r.graph).size() == 4);
    }
  }
}

TEST_CASE("round count bounds") {
  const int n = 30;
  for (int prefix : {1, 3, 7, 26, 50}) {
    const SimMatrix s = oracle::random_similarity(n, 500 + prefix);
    TmfgBuilder builder(s);
    int rounds = 0;
    while (!builder.done()) {
      builder.insert_batch(builder.select_batch(prefix));
      ++rounds;
    }
    CAPTURE(prefix);
    const int lower = (n - 4 + prefix - 1) / prefix;
    CHECK(rounds >= lower);
    CHECK(rounds <= n - 4);
  }
}

TEST_CASE("live faces are triangles of existing edges and pairwise distinct") {
  const SimMatrix s = oracle::random_similarity(20, 77);
  const TmfgResult r = build_tmfg(s, {4});
  const auto edges = oracle::edge_set(r.graph);
  std::set<Face> seen;
  for (std::size_t id = 0; id < r.graph.faces.size(); ++id) {
    if (!r.graph.face_live[id]) continue;
    const Face& f = r.graph.faces[id];
    CHECK(seen.insert(f).second);
    CHECK(edges.count({f.v[0], f.v[1]}) == 1);
    CHECK(edges.count({f.v[0], f.v[2]}) == 1);
    CHECK(edges.count({f.v[1], f.v[2]}) == 1);
  }
}

TEST_CASE("gain table matches brute force after every round") {
  for (int n : {8, 17, 32}) {
    for (int prefix : {1, 3}) {
      const SimMatrix s = oracle::random_similarity(n, 9'000 + n + prefix);
      TmfgBuilder builder(s);
      while (!builder.done()) {
        builder.insert_batch(builder.select_batch(prefix));
        if (builder.done()) break;
        for (std::size_t id = 0; id < builder.graph().faces.size(); ++id) {
          if (!builder.graph().face_live[id]) continue;
          const Face& face = builder.graph().faces[id];
          int best = -1;
          double best_gain = 0.0;
          for (int v : builder.remaining()) {
            const double gain = builder.gain_of(v, face);
            if (best < 0 || gain > best_gain) {
              best = v;
              best_gain = gain;
            }
          }
          CHECK(builder.gain_entry(static_cast<int>(id)).best_vertex == best);
          CHECK(builder.gain_entry(static_cast<int>(id)).gain == best_gain);
        }
      }
    }
  }
}

TEST_CASE("determinism: identical insertion log across thread counts") {
  const SimMatrix s = oracle::random_similarity(40, 4242);
  const int saved = par::thread_count();
  par::set_thread_count(1);
  const TmfgResult one = build_tmfg(s, {5});
  par::set_thread_count(4);
  const TmfgResult four = build_tmfg(s, {5});
  par::set_thread_count(saved);

  REQUIRE(one.graph.insertion_log.size() == four.graph.insertion_log.size());
  for (std::size_t i = 0; i < one.graph.insertion_log.size(); ++i) {
    CHECK(one.graph.insertion_log[i].vertex == four.graph.insertion_log[i].vertex);
    CHECK(one.graph.insertion_log[i].face == four.graph.insertion_log[i].face);
    CHECK(one.graph.insertion_log[i].round == four.graph.insertion_log[i].round);
    CHECK(one.graph.insertion_log[i].gain == four.graph.insertion_log[i].gain);
  }
  CHECK(one.graph.edge_list_text() == four.graph.edge_list_text());
}

TEST_CASE("edge list export is lexicographically sorted") {
  const SimMatrix s = fixtures::small_similarity();
  const TmfgResult r = build_tmfg(s, {1});
  const std::string text = r.graph.edge_list_text();
  std::istringstream in(text);
  std::string line;
  int prev_u = -1, prev_v = -1, count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    int u, v;
    double w;
    REQUIRE((ls >> u >> v >> w));
    CHECK(u < v);
    CHECK((u > prev_u || (u == prev_u && v > prev_v)));
    CHECK(w == s.w(u, v));
    prev_u = u;
    prev_v = v;
    ++count;
  }
  CHECK(count == 15);
}

TEST_CASE("insertion log export format") {
  const SimMatrix s = fixtures::small_similarity();
  const TmfgResult r = build_tmfg(s, {2});
  const std::string text = r.graph.insertion_log_text();
  CHECK(text.substr(0, text.find('\n')) == "0 3 0,1,2 1.6");
}

TEST_CASE("invalid prefix is rejected") {
  const SimMatrix s = fixtures::small_similarity();
  CHECK_THROWS_AS(build_tmfg(s, {0}), Error);
}

TEST_CASE("all-negative similarities still build a maximal planar graph") {
  const SimMatrix s = oracle::random_similarity(12, 345, -0.9, -0.1);
  const TmfgResult r = build_tmfg(s, {2});
  CHECK(r.graph.edges.size() == 3 * 12 - 6);
  for (const auto& rec : r.graph.insertion_log) CHECK(rec.gain < 0.0);
  // still matches the sequential oracle
  const TmfgResult r1 = build_tmfg(s, {1});
  CHECK(oracle::edge_set(r1.graph) == oracle::sequential_tmfg(s).edges);
}

TEST_CASE("prefix-1 fast path agrees with the head of the sorted selection") {
  const SimMatrix s = oracle::random_similarity(18, 998);
  TmfgBuilder builder(s);
  while (!builder.done()) {
    const auto one = builder.select_batch(1);
    const auto two = builder.select_batch(2);
    REQUIRE(one.size() == 1);
    REQUIRE(two.size() >= 1);
    CHECK(one[0].vertex == two[0].vertex);
    CHECK(one[0].face_id == two[0].face_id);
    CHECK(one[0].gain == two[0].gain);
    builder.insert_batch(one);
  }
}
