#pragma once

#include <map>
#include <string>
#include <vector>

#include "pfg/error.hpp"
#include "pfg/tmfg.hpp"

namespace pfg {

// Adjusted Rand Index between two labelings. 1 for identical partitions,
// expected value ~0 for random assignments. Degenerate inputs where the
// correction term equals the index (both partitions trivial) score 1.
inline double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size())
    fail(errc::length_mismatch, "label vectors differ in length: " + std::to_string(truth.size()) +
                                    " vs " + std::to_string(pred.size()));
  const std::size_t n = truth.size();
  if (n < 2) fail(errc::length_mismatch, "need at least 2 labeled objects");

  std::map<int, int> row_of, col_of;
  for (int t : truth) row_of.emplace(t, 0);
  for (int p : pred) col_of.emplace(p, 0);
  int r = 0, c = 0;
  for (auto& [key, idx] : row_of) idx = r++;
  for (auto& [key, idx] : col_of) idx = c++;

  std::vector<long long> counts(static_cast<std::size_t>(r) * c, 0);
  std::vector<long long> row_sum(r, 0), col_sum(c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int ri = row_of[truth[i]];
    const int ci = col_of[pred[i]];
    ++counts[static_cast<std::size_t>(ri) * c + ci];
    ++row_sum[ri];
    ++col_sum[ci];
  }

  auto comb2 = [](long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); };
  double sum_cells = 0.0;
  for (long long x : counts) sum_cells += comb2(x);
  double sum_rows = 0.0, sum_cols = 0.0;
  for (long long x : row_sum) sum_rows += comb2(x);
  for (long long x : col_sum) sum_cols += comb2(x);

  const double total = comb2(static_cast<long long>(n));
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  const double denom = maximum - expected;
  if (denom == 0.0) return 1.0;
  return (sum_cells - expected) / denom;
}

// Ratio of total edge weight kept by one filtered graph versus another.
inline double edge_weight_ratio(const TmfgGraph& a, const TmfgGraph& b) {
  return a.edge_weight_sum() / b.edge_weight_sum();
}

}  // namespace pfg
