#pragma once

#include <cstdint>
#include <vector>

#include "dcsbm/crp.hpp"
#include "dcsbm/network.hpp"
#include "dcsbm/rng.hpp"

namespace dcsbm {

// Static: mu_ij = theta_ci + theta_cj + beta_zi 1{z_i=z_j}.
// DynamicPopularity: popularity cluster per (actor, time).
// DynamicLag: shared popularities plus eta * y_{t-1,ij} carried edges.
enum class ModelKind { Static, DynamicPopularity, DynamicLag };

struct Hyperparameters {
  double community_shape = 5.0, community_rate = 5.0;    // Gamma prior on nu
  double popularity_shape = 5.0, popularity_rate = 5.0;  // Gamma prior on alpha
  double var_beta = 1.0;
  double var_theta = 1.0;
  double var_eta = 1.0;
  void validate() const;
};

// Uniform read view over one or several snapshots; borrows the networks.
class NetView {
 public:
  explicit NetView(const StaticNetwork& net);
  explicit NetView(const DynamicNetwork& net);
  int n() const { return n_; }
  int T() const { return T_; }
  bool y(int t, int i, int j) const {  // 0-based actors, any order
    if (i > j) { const int k = i; i = j; j = k; }
    return adj_[t][pair_index(n_, i, j)] != 0;
  }

 private:
  int n_ = 0, T_ = 0;
  std::vector<const std::uint8_t*> adj_;
};

struct SamplerState {
  ModelKind model = ModelKind::Static;
  int n = 0;
  int T = 1;
  std::vector<double> zeta;  // T * pair_count(n), time-major
  CrpState z;                // communities over n actors, values beta*
  CrpState c;                // popularities over c_units(), values theta*
  Concentration nu;          // community concentration
  Concentration alpha;       // popularity concentration
  double eta = 0.0;

  int c_units() const { return model == ModelKind::DynamicPopularity ? n * T : n; }
  int c_unit(int i, int t) const {
    return model == ModelKind::DynamicPopularity ? t * n + i : i;
  }
  double theta_of(int i, int t) const {
    return c.value(c.assignment(c_unit(i, t)));
  }
  double zeta_at(int t, int i, int j) const {  // 0-based, i < j
    return zeta[static_cast<std::size_t>(t) * pair_count(n) + pair_index(n, i, j)];
  }
};

// Latent mean of pair (i,j) at time t under the current parameters,
// including the carried-edge term of the lag model.
double pair_mean(const SamplerState& s, const NetView& y, int t, int i, int j);

// zeta with the carried-edge effect removed; equals zeta outside the lag
// model.  The popularity and community conditionals are all linear in this
// quantity.
double zeta_minus_lag(const SamplerState& s, const NetView& y, int t, int i, int j);

struct NormalParams {
  double mean = 0.0;
  double var = 1.0;
};

// Full conditionals of the cluster-level coefficients.  These are the
// closed forms the kernels draw from; exposed so tests can pin them
// against the algebra independently.
NormalParams beta_conditional(const SamplerState& s, const NetView& y,
                              const Hyperparameters& h, int slot);
NormalParams theta_conditional(const SamplerState& s, const NetView& y,
                               const Hyperparameters& h, int slot);
NormalParams eta_conditional(const SamplerState& s, const NetView& y,
                             const Hyperparameters& h);

// Allocation conditional of one unit: log weights for each live cluster
// plus a fresh one, and the distribution the fresh cluster's value takes.
// Counts exclude the unit itself.
struct AllocationWeights {
  std::vector<int> slot;
  std::vector<double> logw;
  double logw_new = 0.0;
  NormalParams new_value;
};
AllocationWeights community_conditional(const SamplerState& s, const NetView& y,
                                        const Hyperparameters& h, int actor);
AllocationWeights popularity_conditional(const SamplerState& s, const NetView& y,
                                         const Hyperparameters& h, int unit);

// One Gibbs kernel each, scanning in fixed order.
void step_zeta(RandomSource& rng, SamplerState& s, const NetView& y);
void step_z(RandomSource& rng, SamplerState& s, const NetView& y,
            const Hyperparameters& h);
void step_beta(RandomSource& rng, SamplerState& s, const NetView& y,
               const Hyperparameters& h);
void step_alpha(RandomSource& rng, SamplerState& s);
void step_c(RandomSource& rng, SamplerState& s, const NetView& y,
            const Hyperparameters& h);
void step_theta(RandomSource& rng, SamplerState& s, const NetView& y,
                const Hyperparameters& h);
void step_nu(RandomSource& rng, SamplerState& s);
void step_eta(RandomSource& rng, SamplerState& s, const NetView& y,
              const Hyperparameters& h);

// Full sweep: zeta, z, beta, alpha, c, theta, nu, then eta for the lag
// model.  Cluster slots are compacted at the end.
void sweep(RandomSource& rng, SamplerState& s, const NetView& y,
           const Hyperparameters& h);

// Draw every parameter from its prior, then zeta from its conditional.
SamplerState initialize_state(RandomSource& rng, const NetView& y,
                              ModelKind model, const Hyperparameters& h);

// Forward data draw given the parameters: y_{t,ij} ~ Bern(Phi(mu_{t,ij})),
// sequential in t so the lag model sees its own earlier snapshots.
DynamicNetwork generate_network(RandomSource& rng, const SamplerState& s);

}  // namespace dcsbm
