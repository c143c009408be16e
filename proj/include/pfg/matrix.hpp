#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pfg/error.hpp"
#include "pfg/parallel.hpp"

namespace pfg {

// Dense square matrix of doubles, row-major.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = 0.0)
      : n_(n), cells_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

  int size() const { return n_; }

  double operator()(int i, int j) const { return cells_[index(i, j)]; }
  double& operator()(int i, int j) { return cells_[index(i, j)]; }

  const std::vector<double>& cells() const { return cells_; }

private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> cells_;
};

// Symmetric similarity weights over n >= 4 objects. The diagonal is pinned to 1
// and never consulted by downstream gain computations.
class SimMatrix {
public:
  static SimMatrix from_matrix(SquareMatrix m) {
    const int n = m.size();
    if (n < 4) fail(errc::too_small, "similarity matrix needs n >= 4, got n = " + std::to_string(n));
    for (int i = 0; i < n; ++i) {
      m(i, i) = 1.0;
      for (int j = i + 1; j < n; ++j) {
        if (!std::isfinite(m(i, j)) || !std::isfinite(m(j, i)))
          fail(errc::parse, "similarity matrix has a non-finite entry");
        if (m(i, j) != m(j, i))
          fail(errc::parse, "similarity matrix is not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      }
    }
    return SimMatrix(std::move(m));
  }

  int n() const { return w_.size(); }
  double w(int i, int j) const { return w_(i, j); }
  const SquareMatrix& weights() const { return w_; }

  // Off-diagonal row sum, accumulated in ascending column order.
  double row_sum(int i) const {
    double s = 0.0;
    for (int j = 0; j < n(); ++j)
      if (j != i) s += w_(i, j);
    return s;
  }

private:
  explicit SimMatrix(SquareMatrix m) : w_(std::move(m)) {}
  SquareMatrix w_;
};

// Symmetric nonnegative dissimilarities with a zero diagonal; these weight the
// TMFG edges for all shortest-path computations.
class DisMatrix {
public:
  static DisMatrix from_matrix(SquareMatrix m) {
    const int n = m.size();
    if (n < 4) fail(errc::too_small, "dissimilarity matrix needs n >= 4, got n = " + std::to_string(n));
    for (int i = 0; i < n; ++i) {
      m(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double d = m(i, j);
        if (!std::isfinite(d) || d != m(j, i))
          fail(errc::parse, "dissimilarity matrix is not finite/symmetric");
        if (d < 0.0)
          fail(errc::negative_weight, "dissimilarity matrix has a negative entry at (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
    return DisMatrix(std::move(m));
  }

  int n() const { return d_.size(); }
  double d(int i, int j) const { return d_(i, j); }
  const SquareMatrix& distances() const { return d_; }

private:
  explicit DisMatrix(SquareMatrix m) : d_(std::move(m)) {}
  SquareMatrix d_;
};

// n observation rows of equal length L >= 2.
class TimeSeriesSet {
public:
  static TimeSeriesSet from_rows(std::vector<std::vector<double>> rows) {
    if (rows.empty()) fail(errc::too_small, "time series input is empty");
    const std::size_t len = rows.front().size();
    if (len < 2) fail(errc::too_small, "time series rows need length >= 2");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != len)
        fail(errc::parse, "time series row " + std::to_string(i) + " has length " +
                              std::to_string(rows[i].size()) + ", expected " + std::to_string(len));
      for (double x : rows[i])
        if (!std::isfinite(x)) fail(errc::parse, "time series row " + std::to_string(i) + " has a non-finite value");
    }
    return TimeSeriesSet(std::move(rows));
  }

  int count() const { return static_cast<int>(rows_.size()); }
  int length() const { return static_cast<int>(rows_.front().size()); }
  const std::vector<double>& row(int i) const { return rows_[i]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

private:
  explicit TimeSeriesSet(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {}
  std::vector<std::vector<double>> rows_;
};

// Pearson correlation of every row pair; the similarity measure for the
// pipeline. Rows are correlated pairwise after centering, and the result is
// clamped into [-1, 1].
inline SimMatrix pearson_similarity(const TimeSeriesSet& ts) {
  const int n = ts.count();
  const int len = ts.length();
  if (n < 4) fail(errc::too_small, "need at least 4 series, got " + std::to_string(n));

  std::vector<std::vector<double>> centered(static_cast<std::size_t>(n));
  std::vector<double> norm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& row = ts.row(i);
    double lo = row[0], hi = row[0];
    double mean = 0.0;
    for (double x : row) {
      mean += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (lo == hi) fail(errc::zero_variance, "row " + std::to_string(i) + " is constant");
    mean /= len;
    auto& c = centered[i];
    c.resize(len);
    double sq = 0.0;
    for (int t = 0; t < len; ++t) {
      c[t] = row[t] - mean;
      sq += c[t] * c[t];
    }
    norm[i] = std::sqrt(sq);
    if (norm[i] == 0.0) fail(errc::zero_variance, "row " + std::to_string(i) + " has zero variance");
  }

  SquareMatrix w(n, 0.0);
  par::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t iu) {
    const int i = static_cast<int>(iu);
    w(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double dot = 0.0;
      const auto& a = centered[i];
      const auto& b = centered[j];
      for (int t = 0; t < len; ++t) dot += a[t] * b[t];
      double p = dot / (norm[i] * norm[j]);
      p = std::min(1.0, std::max(-1.0, p));
      w(i, j) = p;
      w(j, i) = p;
    }
  }, 1);
  return SimMatrix::from_matrix(std::move(w));
}

// d = sqrt(2(1 - w)), mapping similarity in [-1, 1] onto distances in [0, 2].
inline DisMatrix to_dissimilarity(const SimMatrix& s) {
  constexpr double kTol = 1e-9;
  const int n = s.n();
  SquareMatrix d(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = s.w(i, j);
      if (std::abs(w) > 1.0 + kTol)
        fail(errc::out_of_range, "similarity " + std::to_string(w) + " at (" + std::to_string(i) +
                                     "," + std::to_string(j) + ") is outside [-1, 1]");
      const double clamped = std::min(1.0, std::max(-1.0, w));
      const double dist = std::sqrt(std::max(0.0, 2.0 * (1.0 - clamped)));
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return DisMatrix::from_matrix(std::move(d));
}

}  // namespace pfg
