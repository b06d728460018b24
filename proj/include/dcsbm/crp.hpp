#pragma once

#include <vector>

namespace dcsbm {

class RandomSource;

// Gamma-prior concentration parameter of a Dirichlet process.
struct Concentration {
  double value = 1.0;
  double prior_shape = 5.0;
  double prior_rate = 5.0;
};

// Partition of `units` items with one double value per cluster.  Slots of
// removed clusters become tombstones (count 0) and are recycled by
// add_cluster; compact() squeezes them out and renumbers.
class CrpState {
 public:
  CrpState() = default;
  static CrpState single_cluster(int units, double value);
  static CrpState all_pending(int units);
  // Build from explicit assignments (values aligned with the distinct
  // labels in order of first appearance).
  static CrpState from_assignments(const std::vector<int>& labels,
                                   const std::vector<double>& values);

  int units() const { return static_cast<int>(assign_.size()); }
  int live_clusters() const { return live_; }
  int slots() const { return static_cast<int>(count_.size()); }

  int assignment(int unit) const { return assign_[unit]; }  // -1 while pending
  int count(int slot) const { return count_[slot]; }
  double value(int slot) const { return value_[slot]; }
  void set_value(int slot, double v) { value_[slot] = v; }
  bool live(int slot) const { return count_[slot] > 0; }

  // Detach `unit` and drop its cluster if that leaves the cluster empty.
  // Returns true when a cluster died.  The unit's assignment becomes
  // pending either way only if the cluster died; otherwise it stays put
  // and callers exclude it from counts themselves.
  bool remove_if_singleton(int unit);

  void move(int unit, int slot);              // reassign to a live slot
  int assign_new_cluster(int unit, double v); // fresh cluster around the unit

  // Renumber slots 0..K-1 in order of first appearance over units,
  // dropping tombstones.  The partition itself is unchanged.
  void compact();

  // 1-based contiguous labels in order of first appearance, plus the
  // cluster values aligned with those labels.
  std::vector<int> labels_contiguous() const;
  std::vector<double> values_contiguous() const;

  bool counts_consistent() const;  // recount against assignments

 private:
  std::vector<int> assign_;
  std::vector<int> count_;
  std::vector<double> value_;
  std::vector<int> free_;
  int live_ = 0;
};

// Prior allocation weights for `unit`: per live slot the count excluding
// the unit itself, and conc.value for a new cluster.  Weights are returned
// unnormalized; a slot whose excluded count is zero gets weight zero.
struct CrpWeights {
  std::vector<int> slot;
  std::vector<double> weight;
  double new_cluster_weight = 0.0;
};
CrpWeights crp_prior_weights(const CrpState& state, int unit,
                             const Concentration& conc);

// Escobar-West auxiliary update of a DP concentration given k live
// clusters among n_units items.  Exposed pieces keep the arithmetic
// testable: mixture_odds returns pi/(1-pi) for the higher-shape component
// given the auxiliary gamma draw.
double escobar_west_odds(double prior_shape, double prior_rate, int k_live,
                         int n_units, double aux_gamma);
Concentration update_concentration(RandomSource& rng, const Concentration& conc,
                                   int k_live, int n_units);

// Sequential CRP draw over `units` items with iid N(value_mean, value_var)
// cluster values; the prior simulation both initialization and the
// forward half of the joint-distribution checks rely on.
CrpState crp_prior_draw(RandomSource& rng, int units, const Concentration& conc,
                        double value_var, double value_mean = 0.0);

}  // namespace dcsbm
