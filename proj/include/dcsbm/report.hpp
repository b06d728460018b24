#pragma once

#include <string>
#include <vector>

#include "dcsbm/chains.hpp"
#include "dcsbm/network.hpp"
#include "dcsbm/posterior.hpp"

namespace dcsbm {

// Everything a fit needs, assembled from config file, flags and defaults.
struct RunConfig {
  ModelKind model = ModelKind::Static;
  std::vector<std::string> data;  // one snapshot, or several for the dynamics
  std::string labels_path;
  int n_hint = 0;
  IndexBase base = IndexBase::Auto;
  McmcConfig mcmc;
  Hyperparameters hyper;
  std::string output_dir;
};

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);

// Flat "key = value" lines, '#' comments.  Unknown keys are an error so
// typos do not silently fall back to defaults.
RunConfig parse_config_file(const std::string& path);
// Shared by the config parser and the flag overrides.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

struct RunMeta {
  RunConfig cfg;
  int n = 0, T = 0, c_units = 0;
  std::vector<double> chain_seconds;
};

void write_run_meta(const std::string& dir, const RunMeta& meta);
RunMeta read_run_meta(const std::string& dir);

// chain_<k>.csv holds the scalar trace and both label vectors per kept
// draw; chain_<k>_clusters.csv holds the ragged coefficient rows.
void write_chain_output(const std::string& dir, const ChainOutput& co);
std::vector<ChainOutput> read_chain_outputs(const std::string& dir);

void write_count_csv(const std::string& path, const CountSummary& cs);
void write_scalar_csv(const std::string& path, const FitSummary& fs);
void write_similarity_csv(const std::string& path, const SimilarityMatrix& S);
void write_labels_csv(const std::string& path, const std::vector<int>& labels,
                      const std::vector<std::string>& names);

// Hand-rolled SVG: histogram bars for an integer summary, and a
// cluster-ordered heatmap of a similarity matrix.
void write_hist_svg(const std::string& path, const CountSummary& cs,
                    const std::string& title);
void write_heatmap_svg(const std::string& path, const SimilarityMatrix& S,
                       const std::vector<int>& order_labels,
                       const std::string& title);

void write_summary_text(const std::string& path, const FitSummary& fs,
                        const HardClustering& community,
                        const HardClustering& popularity,
                        const std::vector<std::string>& names);

}  // namespace dcsbm
