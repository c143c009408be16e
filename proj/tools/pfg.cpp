// Command-line driver: sparsify a similarity matrix into a TMFG and cluster it
// with DBHT, or generate synthetic benchmark series.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pfg/dbht.hpp"
#include "pfg/io.hpp"
#include "pfg/linkage.hpp"
#include "pfg/metrics.hpp"
#include "pfg/pipeline.hpp"
#include "pfg/tmfg.hpp"

namespace {

int run_command(const pfg::RunConfig& cfg) {
  pfg::PipelineResult result = pfg::run_pipeline(cfg);

  if (result.input_asymmetry > 1e-8)
    std::cerr << "warning: input matrix asymmetry up to " << pfg::format_g9(result.input_asymmetry)
              << " repaired by averaging\n";

  if (!cfg.out_linkage.empty())
    pfg::write_text_file(cfg.out_linkage, pfg::linkage_matrix_text(result.dendrogram));
  if (!cfg.out_json.empty())
    pfg::write_text_file(cfg.out_json, pfg::dendrogram_json(result.dendrogram));
  if (!cfg.out_newick.empty())
    pfg::write_text_file(cfg.out_newick, pfg::dendrogram_newick(result.dendrogram));
  if (!cfg.out_labels.empty()) {
    if (result.labels.empty()) pfg::fail(pfg::errc::bad_config, "--out-labels needs --cut");
    pfg::write_text_file(cfg.out_labels, pfg::labels_text(result.labels));
  }
  if (!cfg.out_edges.empty())
    pfg::write_text_file(cfg.out_edges, result.tmfg.graph.edge_list_text());
  if (!cfg.out_log.empty())
    pfg::write_text_file(cfg.out_log, result.tmfg.graph.insertion_log_text());
  if (!cfg.out_tree.empty())
    pfg::write_text_file(cfg.out_tree, pfg::bubble_tree_text(result.tmfg.tree));
  if (!cfg.out_assign.empty())
    pfg::write_text_file(cfg.out_assign, result.assignment.text());

  const auto& graph = result.tmfg.graph;
  std::cout << "n " << graph.n << " edges " << graph.edges.size() << " edge_weight_sum "
            << pfg::format_g9(graph.edge_weight_sum()) << " bubbles " << result.tmfg.tree.size()
            << "\n";
  if (!result.labels.empty()) std::cout << "clusters " << cfg.cut_k << "\n";
  if (result.ari) std::cout << "ari " << pfg::format_g9(*result.ari) << "\n";
  if (cfg.bench) {
    std::cout << result.times.table();
    std::cout << result.times.csv();
  }
  return 0;
}

int gen_command(const pfg::SyntheticConfig& cfg, const std::string& out_path,
                const std::string& labels_path) {
  pfg::Synthetic data = pfg::gen_synthetic(cfg);
  pfg::write_text_file(out_path, pfg::time_series_csv(data.series()));
  if (!labels_path.empty()) pfg::write_text_file(labels_path, pfg::labels_text(data.labels));
  std::cout << "wrote " << cfg.n << " series of length " << cfg.length << " in " << cfg.clusters
            << " clusters to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TMFG construction and DBHT hierarchical clustering"};
  app.require_subcommand(1);

  pfg::RunConfig run_cfg;
  std::string kind = "timeseries";
  auto* run = app.add_subcommand("run", "run the clustering pipeline on an input file");
  run->add_option("--input", run_cfg.input_path, "input file (CSV or whitespace separated)")
      ->required();
  run->add_option("--input-dis", run_cfg.input_dis_path,
                  "dissimilarity matrix file (kind dissimilarity-pair only)");
  run->add_option("--kind", kind, "input kind: timeseries | similarity | dissimilarity-pair")
      ->check(CLI::IsMember({"timeseries", "similarity", "dissimilarity-pair"}));
  run->add_option("--prefix", run_cfg.prefix, "max vertex insertions per round (>= 1)");
  run->add_option("--threads", run_cfg.threads, "worker threads (default: hardware)");
  run->add_option("--cut", run_cfg.cut_k, "cut the dendrogram into k clusters");
  run->add_option("--labels", run_cfg.labels_path, "ground-truth labels (one integer per line)");
  run->add_flag("--header", run_cfg.header, "skip one header line in inputs");
  run->add_flag("--bench", run_cfg.bench, "print per-phase wall-clock table and CSV");
  run->add_option("--out-linkage", run_cfg.out_linkage, "write linkage matrix (left right height size)");
  run->add_option("--out-json", run_cfg.out_json, "write dendrogram JSON");
  run->add_option("--out-newick", run_cfg.out_newick, "write dendrogram Newick");
  run->add_option("--out-labels", run_cfg.out_labels, "write flat cluster labels (needs --cut)");
  run->add_option("--out-edges", run_cfg.out_edges, "write TMFG edge list (i j w)");
  run->add_option("--out-log", run_cfg.out_log, "write insertion log (round vertex face gain)");
  run->add_option("--out-tree", run_cfg.out_tree, "write bubble tree dump");
  run->add_option("--out-assign", run_cfg.out_assign, "write vertex assignments (vertex group bubble)");

  pfg::SyntheticConfig gen_cfg;
  std::string gen_out, gen_labels;
  long long gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "generate synthetic Gaussian-cluster time series");
  gen->add_option("--n", gen_cfg.n, "number of series")->required();
  gen->add_option("--clusters", gen_cfg.clusters, "number of clusters")->required();
  gen->add_option("--len", gen_cfg.length, "series length");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--noise", gen_cfg.noise, "noise level");
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--out-labels", gen_labels, "write ground-truth labels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (kind == "timeseries") run_cfg.kind = pfg::InputKind::timeseries;
      else if (kind == "similarity") run_cfg.kind = pfg::InputKind::similarity;
      else run_cfg.kind = pfg::InputKind::dissimilarity_pair;
      return run_command(run_cfg);
    }
    gen_cfg.seed = static_cast<std::uint64_t>(gen_seed);
    return gen_command(gen_cfg, gen_out, gen_labels);
  } catch (const pfg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
