#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfg/dbht.hpp"
#include "pfg/error.hpp"
#include "pfg/io.hpp"
#include "pfg/linkage.hpp"
#include "pfg/matrix.hpp"
#include "pfg/metrics.hpp"
#include "pfg/parallel.hpp"
#include "pfg/tmfg.hpp"

namespace pfg {

enum class InputKind { timeseries, similarity, dissimilarity_pair };

struct RunConfig {
  std::string input_path;
  std::string input_dis_path;  // dissimilarity matrix for dissimilarity_pair
  InputKind kind = InputKind::timeseries;
  int prefix = 1;
  int threads = 0;  // 0 = hardware concurrency
  int cut_k = 0;    // 0 = no cut
  bool header = false;
  bool bench = false;
  std::string labels_path;
  std::string out_linkage, out_json, out_newick, out_labels;
  std::string out_edges, out_log, out_tree, out_assign;
};

// Wall-clock seconds per pipeline phase, mirroring the runtime decomposition
// used for benchmarking: TMFG construction, shortest paths, bubble-tree work
// (directions plus vertex assignment), and the linkage hierarchy.
struct PhaseTimes {
  double load = 0.0;
  double tmfg = 0.0;
  double apsp = 0.0;
  double bubble = 0.0;
  double hierarchy = 0.0;

  std::string table() const {
    std::string out = "phase      seconds\n";
    out += "load       " + format_g9(load) + "\n";
    out += "tmfg       " + format_g9(tmfg) + "\n";
    out += "apsp       " + format_g9(apsp) + "\n";
    out += "bubble     " + format_g9(bubble) + "\n";
    out += "hierarchy  " + format_g9(hierarchy) + "\n";
    return out;
  }

  std::string csv() const {
    std::string out = "phase,seconds\n";
    out += "load," + format_g9(load) + "\n";
    out += "tmfg," + format_g9(tmfg) + "\n";
    out += "apsp," + format_g9(apsp) + "\n";
    out += "bubble," + format_g9(bubble) + "\n";
    out += "hierarchy," + format_g9(hierarchy) + "\n";
    return out;
  }
};

struct PipelineResult {
  TmfgResult tmfg;
  Assignment assignment;
  Dendrogram dendrogram;
  std::vector<int> labels;  // filled when cut_k > 0
  std::optional<double> ari;
  PhaseTimes times;
  double input_asymmetry = 0.0;
};

namespace pipeline_detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct LoadedInput {
  SimMatrix sim;
  DisMatrix dis;
  double asymmetry = 0.0;
};

inline LoadedInput load_input(const RunConfig& cfg) {
  switch (cfg.kind) {
    case InputKind::timeseries: {
      const TimeSeriesSet ts = load_time_series(cfg.input_path, cfg.header);
      SimMatrix sim = pearson_similarity(ts);
      DisMatrix dis = to_dissimilarity(sim);
      return {std::move(sim), std::move(dis), 0.0};
    }
    case InputKind::similarity: {
      LoadedMatrix loaded = load_square_matrix(cfg.input_path, cfg.header);
      SimMatrix sim = SimMatrix::from_matrix(std::move(loaded.matrix));
      DisMatrix dis = to_dissimilarity(sim);
      return {std::move(sim), std::move(dis), loaded.max_asymmetry};
    }
    case InputKind::dissimilarity_pair: {
      if (cfg.input_dis_path.empty())
        fail(errc::bad_config, "dissimilarity_pair input needs both a similarity and a dissimilarity file");
      LoadedMatrix s = load_square_matrix(cfg.input_path, cfg.header);
      LoadedMatrix d = load_square_matrix(cfg.input_dis_path, cfg.header);
      SimMatrix sim = SimMatrix::from_matrix(std::move(s.matrix));
      DisMatrix dis = DisMatrix::from_matrix(std::move(d.matrix));
      if (sim.n() != dis.n()) fail(errc::not_square, "similarity and dissimilarity sizes differ");
      return {std::move(sim), std::move(dis), std::max(s.max_asymmetry, d.max_asymmetry)};
    }
  }
  fail(errc::bad_config, "unknown input kind");
}

}  // namespace pipeline_detail

// Core pipeline on in-memory matrices: TMFG -> directions -> APSP ->
// assignments -> hierarchy -> heights.
inline PipelineResult run_pipeline_matrices(const SimMatrix& sim, const DisMatrix& dis,
                                            const RunConfig& cfg) {
  using pipeline_detail::seconds_since;
  PipelineResult result;

  auto t0 = std::chrono::steady_clock::now();
  result.tmfg = build_tmfg(sim, {cfg.prefix});
  result.times.tmfg = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const std::vector<double> degrees = result.tmfg.graph.weighted_degrees();
  compute_directions(result.tmfg.tree, degrees, sim);
  result.times.bubble = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const Apsp apsp = all_pairs_shortest_paths(result.tmfg.graph, dis);
  result.times.apsp = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.assignment = dbht_assign(result.tmfg.tree, sim, apsp);
  result.times.bubble += seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.dendrogram = build_hierarchy(result.assignment, apsp);
  assign_heights(result.dendrogram, result.assignment);
  result.times.hierarchy = seconds_since(t0);

  if (cfg.cut_k > 0) result.labels = cut(result.dendrogram, cfg.cut_k);
  return result;
}

inline PipelineResult run_pipeline(const RunConfig& cfg) {
  using pipeline_detail::seconds_since;
  if (cfg.prefix < 1) fail(errc::bad_config, "prefix must be >= 1");
  if (cfg.threads > 0) par::set_thread_count(cfg.threads);

  auto t0 = std::chrono::steady_clock::now();
  pipeline_detail::LoadedInput input = pipeline_detail::load_input(cfg);
  const double load_time = seconds_since(t0);
  if (cfg.cut_k > input.sim.n()) fail(errc::bad_config, "cut k exceeds the number of objects");

  // Ground-truth labels are read before the heavy phases so a bad path fails
  // fast with no partial metric output.
  std::vector<int> truth;
  if (!cfg.labels_path.empty()) {
    truth = load_labels(cfg.labels_path);
    if (static_cast<int>(truth.size()) != input.sim.n())
      fail(errc::length_mismatch, "label count does not match input size");
  }

  PipelineResult result = run_pipeline_matrices(input.sim, input.dis, cfg);
  result.times.load = load_time;
  result.input_asymmetry = input.asymmetry;

  if (!truth.empty()) {
    if (result.labels.empty())
      fail(errc::bad_config, "--labels needs --cut to produce a flat clustering");
    result.ari = adjusted_rand_index(truth, result.labels);
  }
  return result;
}

// ---- synthetic data ----

struct SyntheticConfig {
  int n = 100;
  int clusters = 5;
  int length = 128;
  std::uint64_t seed = 1;
  double noise = 0.5;
};

struct Synthetic {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  TimeSeriesSet series() const { return TimeSeriesSet::from_rows(rows); }
};

namespace synth_detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return (splitmix64(state) >> 11) * 0x1.0p-53;
}

// Box-Muller on an explicit generator, so output is identical for a given
// seed regardless of the standard library.
inline double normal(std::uint64_t& state) {
  double u1 = uniform01(state);
  while (u1 <= 0.0) u1 = uniform01(state);
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace synth_detail

// Gaussian-cluster series: cluster c gets a base signal, member rows add
// independent noise. Row i belongs to cluster i mod clusters.
inline Synthetic gen_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n < 4) fail(errc::too_small, "need n >= 4");
  if (cfg.clusters < 1 || cfg.clusters > cfg.n) fail(errc::bad_config, "clusters must be in [1, n]");
  if (cfg.length < 2) fail(errc::bad_config, "series length must be >= 2");

  std::vector<std::vector<double>> base(cfg.clusters);
  for (int c = 0; c < cfg.clusters; ++c) {
    std::uint64_t state = (cfg.seed * 0x9e3779b97f4a7c15ull + 0xc0ffee) ^ static_cast<std::uint64_t>(c);
    base[c].resize(cfg.length);
    for (int t = 0; t < cfg.length; ++t) base[c][t] = synth_detail::normal(state);
  }

  Synthetic out;
  out.rows.resize(cfg.n);
  out.labels.resize(cfg.n);
  par::parallel_for(0, static_cast<std::size_t>(cfg.n), [&](std::size_t i) {
    const int c = static_cast<int>(i) % cfg.clusters;
    out.labels[i] = c;
    std::uint64_t state = (cfg.seed ^ 0xabcdef12345ull) + 0x51ed270b * (i + 1);
    auto& row = out.rows[i];
    row.resize(cfg.length);
    for (int t = 0; t < cfg.length; ++t)
      row[t] = base[c][t] + cfg.noise * synth_detail::normal(state);
  }, 8);
  return out;
}

}  // namespace pfg
