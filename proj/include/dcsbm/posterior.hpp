#pragma once

#include <functional>
#include <map>
#include <vector>

#include "dcsbm/chains.hpp"

namespace dcsbm {

// Posterior co-clustering proportions; immune to label switching because
// only "same cluster or not" enters.  Stored dense, diagonal is 1.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(int n) : n_(n), s_(static_cast<std::size_t>(n) * n, 0.0) {}
  int n() const { return n_; }
  double at(int i, int j) const { return s_[static_cast<std::size_t>(i) * n_ + j]; }
  double& at(int i, int j) { return s_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<double> s_;
};

SimilarityMatrix similarity_matrix(const std::vector<std::vector<int>>& draws);

// Binder loss of a hard clustering against co-clustering proportions:
// sum over pairs of |1{same} - S_ij|.
double binder_loss(const std::vector<int>& labels, const SimilarityMatrix& S);

// All n cut levels of an average-linkage dendrogram built on 1 - S.
std::vector<std::vector<int>> average_linkage_cuts(const SimilarityMatrix& S);

struct HardClustering {
  std::vector<int> labels;  // contiguous 1..K
  double loss = 0.0;
};

// Best Binder clustering among the sampled candidates and the dendrogram
// cuts; when n() <= exhaustive_max_n every partition is scanned as well.
// Ties go to fewer clusters, then to the earlier candidate.
HardClustering minimize_binder(const SimilarityMatrix& S,
                               const std::vector<std::vector<int>>& candidates,
                               int exhaustive_max_n = 0);

// Enumerate set partitions of n items as restricted growth strings.
// Practical only for small n; the Binder minimizer uses it as its exact
// fallback and tests use it as an oracle.
void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& fn);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Split-chain potential scale reduction; 1.0 for constant sequences.
double split_psrf(const std::vector<std::vector<double>>& chains);

struct CountSummary {
  std::map<int, long> histogram;
  int mode = 0;  // ties resolved toward the smaller value
  double mean = 0.0;
  double sd = 0.0;
};

struct RealSummary {
  double mean = 0.0;
  double sd = 0.0;
  double psrf = 1.0;  // across chains; 1 when per-chain series are absent
  double prob_positive = 0.0;
};

// Pooled summaries plus the per-chain breakdowns.
struct FitSummary {
  long total_draws = 0;
  CountSummary K, L;
  RealSummary alpha, nu, eta;
  std::vector<CountSummary> K_chain, L_chain;
  std::vector<RealSummary> alpha_chain, nu_chain, eta_chain;
  bool has_eta = false;
};

FitSummary summarize_scalars(const std::vector<ChainOutput>& chains, bool has_eta);

std::vector<std::vector<int>> collect_z(const std::vector<ChainOutput>& chains);
std::vector<std::vector<int>> collect_c(const std::vector<ChainOutput>& chains);

// Re-runs the coefficient kernels with both partitions frozen (no
// allocation or concentration moves), pooling over cfg.chains chains.
// Coefficients are indexed by order of first appearance of the labels.
struct RefitResult {
  std::vector<double> beta_mean, beta_sd;
  std::vector<double> theta_mean, theta_sd;
  double eta_mean = 0.0, eta_sd = 0.0;
  long kept = 0;
};
RefitResult conditional_refit(const NetView& y, ModelKind model,
                              const Hyperparameters& h,
                              const std::vector<int>& z_labels,
                              const std::vector<int>& c_labels,
                              const McmcConfig& cfg);

}  // namespace dcsbm
