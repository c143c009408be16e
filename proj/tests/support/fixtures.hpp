// Hand-built 7-point similarity fixture with fully known pipeline behavior:
// seed clique {0,1,2,4}, insertions 3 -> {0,1,2}, 5 -> {1,2,3}, 6 -> {0,1,3},
// a four-bubble tree rooted at {0,1,3,6} whose edges all point into {0,1,2,3},
// and second-level subgroups {2,4}, {0,3,6}, {1,5}.
#pragma once

#include <array>
#include <vector>

#include "pfg/bubble_tree.hpp"
#include "pfg/matrix.hpp"

namespace fixtures {

inline constexpr int kSmallN = 7;

// Symmetric weights, diagonal unused.
inline constexpr std::array<std::array<double, 7>, 7> kSmallWeights{{
    {0.00, 0.80, 0.40, 0.40, 0.40, 0.05, 0.20},
    {0.80, 0.00, 0.80, 0.80, 0.80, 0.80, 0.20},
    {0.40, 0.80, 0.00, 0.40, 0.80, 0.20, 0.06},
    {0.40, 0.80, 0.40, 0.00, 0.07, 0.20, 0.20},
    {0.40, 0.80, 0.80, 0.07, 0.00, 0.08, 0.09},
    {0.05, 0.80, 0.20, 0.20, 0.08, 0.00, 0.10},
    {0.20, 0.20, 0.06, 0.20, 0.09, 0.10, 0.00},
}};

inline pfg::SimMatrix small_similarity() {
  pfg::SquareMatrix m(kSmallN, 0.0);
  for (int i = 0; i < kSmallN; ++i) {
    m(i, i) = 1.0;
    for (int j = 0; j < kSmallN; ++j)
      if (i != j) m(i, j) = kSmallWeights[i][j];
  }
  return pfg::SimMatrix::from_matrix(std::move(m));
}

// Expected structure. Bubble ids follow creation order: 0 = seed {0,1,2,4},
// 1 = {0,1,2,3}, 2 = {1,2,3,5}, 3 = {0,1,3,6} (the final root).
inline constexpr int kSeedBubble = 0;
inline constexpr int kCenterBubble = 1;   // the unique converging bubble
inline constexpr int kBubble1235 = 2;
inline constexpr int kRootBubble = 3;

inline const std::vector<std::pair<int, pfg::Face>> kExpectedInsertions = {
    {3, pfg::Face::of(0, 1, 2)},
    {5, pfg::Face::of(1, 2, 3)},
    {6, pfg::Face::of(0, 1, 3)},
};

// vertex -> expected bubble assignment (chi' argmax)
inline const std::vector<int> kExpectedBubbles = {3, 2, 0, 3, 0, 2, 3};

// subgroups of the single group, as (bubble, members) sorted by bubble id
inline const std::vector<std::pair<int, std::vector<int>>> kExpectedSubgroups = {
    {0, {2, 4}},
    {2, {1, 5}},
    {3, {0, 3, 6}},
};

}  // namespace fixtures
