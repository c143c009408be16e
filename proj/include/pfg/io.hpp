#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pfg/error.hpp"
#include "pfg/matrix.hpp"

namespace pfg {

namespace io_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits a line on commas and/or whitespace; empty tokens are dropped.
inline std::vector<double> parse_row(const std::string& line, const std::string& path, int lineno) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p >= end) break;
    double value = 0.0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc()) {
      fail(errc::parse, path + ":" + std::to_string(lineno) + ": cannot parse number near '" +
                            std::string(p, std::min<std::size_t>(8, end - p)) + "'");
    }
    out.push_back(value);
    p = next;
  }
  return out;
}

inline std::vector<std::vector<double>> parse_rows(const std::string& path, bool skip_header) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  int lineno = 0;
  bool skipped = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (skip_header && !skipped) {
      skipped = true;
      continue;
    }
    if (line.find_first_not_of(", \t\r") == std::string::npos) continue;
    rows.push_back(parse_row(line, path, lineno));
  }
  if (rows.empty()) fail(errc::parse, path + ": no data rows");
  return rows;
}

}  // namespace io_detail

struct LoadedMatrix {
  SquareMatrix matrix;
  double max_asymmetry = 0.0;  // before symmetrization
};

// Reads an n x n numeric matrix (CSV or whitespace separated). Asymmetric
// input is repaired by averaging with its transpose; the caller decides
// whether the recorded asymmetry warrants a warning.
inline LoadedMatrix load_square_matrix(const std::string& path, bool skip_header = false) {
  auto rows = io_detail::parse_rows(path, skip_header);
  const int n = static_cast<int>(rows.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      fail(errc::not_square, path + ": row " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " columns, expected " + std::to_string(n));
  }
  if (n < 4) fail(errc::too_small, path + ": matrix is " + std::to_string(n) + "x" + std::to_string(n) + ", need n >= 4");

  LoadedMatrix out{SquareMatrix(n), 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) fail(errc::parse, path + ": non-finite entry");
      out.max_asymmetry = std::max(out.max_asymmetry, std::abs(rows[i][j] - rows[j][i]));
      out.matrix(i, j) = 0.5 * (rows[i][j] + rows[j][i]);
    }
  }
  return out;
}

inline TimeSeriesSet load_time_series(const std::string& path, bool skip_header = false) {
  return TimeSeriesSet::from_rows(io_detail::parse_rows(path, skip_header));
}

// One integer label per line.
inline std::vector<int> load_labels(const std::string& path) {
  const std::string text = io_detail::read_file(path);
  std::vector<int> labels;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    int value = 0;
    auto [next, ec] = std::from_chars(line.data() + a, line.data() + b + 1, value);
    if (ec != std::errc() || next != line.data() + b + 1)
      fail(errc::parse, path + ":" + std::to_string(lineno) + ": expected an integer label");
    labels.push_back(value);
  }
  if (labels.empty()) fail(errc::parse, path + ": no labels");
  return labels;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write " + path);
  out << content;
  if (!out) fail(errc::io, "write failed for " + path);
}

// All floating-point output uses 9 significant digits.
inline std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

inline std::string time_series_csv(const TimeSeriesSet& ts) {
  std::string out;
  for (int i = 0; i < ts.count(); ++i) {
    const auto& row = ts.row(i);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t) out += ',';
      out += format_g9(row[t]);
    }
    out += '\n';
  }
  return out;
}

inline std::string labels_text(const std::vector<int>& labels) {
  std::string out;
  for (int label : labels) {
    out += std::to_string(label);
    out += '\n';
  }
  return out;
}

}  // namespace pfg
