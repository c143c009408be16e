#include <doctest.h>

#include <random>
#include <vector>

#include "pfg/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pfg;

TEST_CASE("ari: perfect match is exactly 1") {
  const std::vector<int> a{0, 0, 1, 1, 2, 2};
  CHECK(adjusted_rand_index(a, a) == 1.0);
  // relabeled but identical partition
  const std::vector<int> b{7, 7, 3, 3, 5, 5};
  CHECK(adjusted_rand_index(a, b) == 1.0);
}

TEST_CASE("ari: degenerate single-class inputs score 1") {
  const std::vector<int> ones(10, 1);
  const std::vector<int> zeros(10, 0);
  CHECK(adjusted_rand_index(ones, zeros) == 1.0);
}

TEST_CASE("ari: hand-built contingency case") {
  // truth [0,0,1,1], pred [0,1,0,1]: all four cells are 1, so the index term
  // is 0, expected = 2*2/6, max = 2; ARI = -(2/3)/(4/3) = -1/2.
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> pred{0, 1, 0, 1};
  CHECK(adjusted_rand_index(truth, pred) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("ari: symmetric and relabel-invariant") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> lab(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> a(40), b(40);
    for (auto& x : a) x = lab(rng);
    for (auto& x : b) x = lab(rng);
    const double ab = adjusted_rand_index(a, b);
    const double ba = adjusted_rand_index(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    std::vector<int> b2 = b;
    for (auto& x : b2) x = 9 - x;  // bijective relabel
    CHECK(adjusted_rand_index(a, b2) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("ari: length mismatch") {
  CHECK_THROWS_AS(adjusted_rand_index({0, 1}, {0, 1, 2}), Error);
  CHECK_THROWS_AS(adjusted_rand_index({0}, {0}), Error);
}

TEST_CASE("edge weight ratio basics") {
  const SimMatrix s = fixtures::small_similarity();
  const TmfgResult a = build_tmfg(s, {1});
  const TmfgResult b = build_tmfg(s, {3});
  CHECK(edge_weight_ratio(a.graph, a.graph) == 1.0);
  const double r1 = edge_weight_ratio(a.graph, b.graph);
  const double r2 = edge_weight_ratio(b.graph, a.graph);
  CHECK(r1 * r2 == doctest::Approx(1.0).epsilon(1e-12));
}
