#include "dcsbm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcsbm/math.hpp"

namespace dcsbm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

void Hyperparameters::validate() const {
  if (!(community_shape > 0.0) || !(community_rate > 0.0) ||
      !(popularity_shape > 0.0) || !(popularity_rate > 0.0))
    throw std::invalid_argument("hyperparameters: concentration priors must be positive");
  if (!(var_beta > 0.0) || !(var_theta > 0.0) || !(var_eta > 0.0))
    throw std::invalid_argument("hyperparameters: variances must be positive");
}

NetView::NetView(const StaticNetwork& net) : n_(net.n()), T_(1) {
  adj_.push_back(net.adjacency());
}

NetView::NetView(const DynamicNetwork& net) : n_(net.n), T_(net.T) {
  if (net.T < 2) throw std::invalid_argument("dynamic view needs at least two snapshots");
  for (const auto& snap : net.snapshots) adj_.push_back(snap.adjacency());
}

namespace {

// Community effect of pair (i,j): beta of the shared community or zero.
inline double community_effect(const SamplerState& s, int i, int j) {
  const int zi = s.z.assignment(i);
  const int zj = s.z.assignment(j);
  return (zi >= 0 && zi == zj) ? s.z.value(zi) : 0.0;
}

}  // namespace

double pair_mean(const SamplerState& s, const NetView& y, int t, int i, int j) {
  double mu = s.theta_of(i, t) + s.theta_of(j, t) + community_effect(s, i, j);
  if (s.model == ModelKind::DynamicLag && t > 0 && y.y(t - 1, i, j)) mu += s.eta;
  return mu;
}

double zeta_minus_lag(const SamplerState& s, const NetView& y, int t, int i, int j) {
  if (i > j) { const int k = i; i = j; j = k; }
  double v = s.zeta_at(t, i, j);
  if (s.model == ModelKind::DynamicLag && t > 0 && y.y(t - 1, i, j)) v -= s.eta;
  return v;
}

void step_zeta(RandomSource& rng, SamplerState& s, const NetView& y) {
  const std::size_t P = pair_count(s.n);
  for (int t = 0; t < s.T; ++t)
    for (int i = 0; i < s.n; ++i)
      for (int j = i + 1; j < s.n; ++j) {
        const double mu = pair_mean(s, y, t, i, j);
        const std::size_t idx = static_cast<std::size_t>(t) * P + pair_index(s.n, i, j);
        s.zeta[idx] = y.y(t, i, j) ? rng.trunc_normal(mu, 0.0, kInf)
                                   : rng.trunc_normal(mu, kNegInf, 0.0);
      }
}

AllocationWeights community_conditional(const SamplerState& s, const NetView& y,
                                        const Hyperparameters& h, int actor) {
  const CrpWeights prior = crp_prior_weights(s.z, actor, s.nu);
  std::vector<int> pos(s.z.slots(), -1);
  for (std::size_t k = 0; k < prior.slot.size(); ++k)
    pos[prior.slot[k]] = static_cast<int>(k);

  // A_k = sum of pair residuals toward cluster k; the residual of (i,j)
  // drops both popularity effects and any carried-edge effect.
  std::vector<double> A(prior.slot.size(), 0.0);
  for (int j = 0; j < s.n; ++j) {
    if (j == actor) continue;
    const int zj = s.z.assignment(j);
    const int k = pos[zj];
    double r = 0.0;
    for (int t = 0; t < s.T; ++t)
      r += zeta_minus_lag(s, y, t, actor, j) - s.theta_of(actor, t) - s.theta_of(j, t);
    A[k] += r;
  }

  // Each candidate pair repeats once per snapshot, so the quadratic term
  // carries a factor T for the dynamic models.
  const double reps = (s.model == ModelKind::Static) ? 1.0 : static_cast<double>(s.T);

  AllocationWeights out;
  out.slot = prior.slot;
  out.logw.resize(prior.slot.size());
  for (std::size_t k = 0; k < prior.slot.size(); ++k) {
    const double m = prior.weight[k];
    if (m <= 0.0) {
      out.logw[k] = kNegInf;
      continue;
    }
    const double b = s.z.value(prior.slot[k]);
    out.logw[k] = std::log(m) + b * A[k] - 0.5 * reps * m * b * b;
  }
  // A fresh community is a singleton: no within pairs touch its beta, so
  // the likelihood factor is one and the coefficient comes from its prior.
  out.logw_new = std::log(prior.new_cluster_weight);
  out.new_value = {0.0, h.var_beta};
  return out;
}

void step_z(RandomSource& rng, SamplerState& s, const NetView& y,
            const Hyperparameters& h) {
  for (int i = 0; i < s.n; ++i) {
    s.z.remove_if_singleton(i);
    const AllocationWeights w = community_conditional(s, y, h, i);
    std::vector<double> logw = w.logw;
    logw.push_back(w.logw_new);
    const std::size_t pick = rng.categorical_log(logw);
    if (pick == w.slot.size())
      s.z.assign_new_cluster(i, rng.normal(w.new_value.mean, w.new_value.var));
    else
      s.z.move(i, w.slot[pick]);
  }
}

NormalParams beta_conditional(const SamplerState& s, const NetView& y,
                              const Hyperparameters& h, int slot) {
  double S = 0.0;
  long within = 0;
  for (int i = 0; i < s.n; ++i) {
    if (s.z.assignment(i) != slot) continue;
    for (int j = i + 1; j < s.n; ++j) {
      if (s.z.assignment(j) != slot) continue;
      ++within;
      for (int t = 0; t < s.T; ++t)
        S += zeta_minus_lag(s, y, t, i, j) - s.theta_of(i, t) - s.theta_of(j, t);
    }
  }
  const double reps = (s.model == ModelKind::Static) ? 1.0 : static_cast<double>(s.T);
  const double prec = 1.0 / h.var_beta + reps * static_cast<double>(within);
  return {S / prec, 1.0 / prec};
}

void step_beta(RandomSource& rng, SamplerState& s, const NetView& y,
               const Hyperparameters& h) {
  for (int k = 0; k < s.z.slots(); ++k) {
    if (!s.z.live(k)) continue;
    const NormalParams p = beta_conditional(s, y, h, k);
    s.z.set_value(k, rng.normal(p.mean, p.var));
  }
}

void step_alpha(RandomSource& rng, SamplerState& s) {
  s.alpha = update_concentration(rng, s.alpha, s.c.live_clusters(), s.c_units());
}

AllocationWeights popularity_conditional(const SamplerState& s, const NetView& y,
                                         const Hyperparameters& h, int unit) {
  const bool per_time = (s.model == ModelKind::DynamicPopularity);
  const int i = per_time ? unit % s.n : unit;
  const int t_lo = per_time ? unit / s.n : 0;
  const int t_hi = per_time ? t_lo + 1 : s.T;

  // R collects (zeta~ - theta_j - community effect) over every pair the
  // unit's popularity enters; npairs is how many Gaussian terms that is.
  double R = 0.0;
  long npairs = 0;
  for (int t = t_lo; t < t_hi; ++t)
    for (int j = 0; j < s.n; ++j) {
      if (j == i) continue;
      R += zeta_minus_lag(s, y, t, i, j) - s.theta_of(j, t) - community_effect(s, i, j);
      ++npairs;
    }

  const double var_c = 1.0 / (static_cast<double>(npairs) + 1.0 / h.var_theta);
  const double mu_c = var_c * R;

  const CrpWeights prior = crp_prior_weights(s.c, unit, s.alpha);
  AllocationWeights out;
  out.slot = prior.slot;
  out.logw.resize(prior.slot.size());
  for (std::size_t k = 0; k < prior.slot.size(); ++k) {
    const double m = prior.weight[k];
    if (m <= 0.0) {
      out.logw[k] = kNegInf;
      continue;
    }
    const double th = s.c.value(prior.slot[k]);
    out.logw[k] = std::log(m) + th * R - 0.5 * static_cast<double>(npairs) * th * th;
  }
  // New cluster weight integrates theta out against its prior:
  // alpha * (sd_c/sd_theta) * exp(mu_c^2 / (2 var_c)).
  out.logw_new = std::log(prior.new_cluster_weight) +
                 0.5 * std::log(var_c / h.var_theta) + 0.5 * mu_c * mu_c / var_c;
  out.new_value = {mu_c, var_c};
  return out;
}

void step_c(RandomSource& rng, SamplerState& s, const NetView& y,
            const Hyperparameters& h) {
  const int U = s.c_units();
  for (int u = 0; u < U; ++u) {
    s.c.remove_if_singleton(u);
    const AllocationWeights w = popularity_conditional(s, y, h, u);
    std::vector<double> logw = w.logw;
    logw.push_back(w.logw_new);
    const std::size_t pick = rng.categorical_log(logw);
    if (pick == w.slot.size())
      s.c.assign_new_cluster(u, rng.normal(w.new_value.mean, w.new_value.var));
    else
      s.c.move(u, w.slot[pick]);
  }
}

NormalParams theta_conditional(const SamplerState& s, const NetView& y,
                               const Hyperparameters& h, int slot) {
  // Within pairs see the coefficient twice (precision weight 4, residual
  // doubled); cross pairs once.  Membership is per (actor, time) so the
  // same loop serves all three models.
  double num = 0.0;
  long within = 0, cross = 0;
  for (int t = 0; t < s.T; ++t)
    for (int i = 0; i < s.n; ++i) {
      if (s.c.assignment(s.c_unit(i, t)) != slot) continue;
      for (int j = 0; j < s.n; ++j) {
        if (j == i) continue;
        const bool j_in = (s.c.assignment(s.c_unit(j, t)) == slot);
        const double resid = zeta_minus_lag(s, y, t, i, j) - community_effect(s, i, j);
        if (j_in) {
          if (j > i) {  // count each within pair once
            num += 2.0 * resid;
            ++within;
          }
        } else {
          num += resid - s.theta_of(j, t);
          ++cross;
        }
      }
    }
  const double prec = 1.0 / h.var_theta + 4.0 * within + 1.0 * cross;
  return {num / prec, 1.0 / prec};
}

void step_theta(RandomSource& rng, SamplerState& s, const NetView& y,
                const Hyperparameters& h) {
  for (int m = 0; m < s.c.slots(); ++m) {
    if (!s.c.live(m)) continue;
    const NormalParams p = theta_conditional(s, y, h, m);
    s.c.set_value(m, rng.normal(p.mean, p.var));
  }
}

void step_nu(RandomSource& rng, SamplerState& s) {
  s.nu = update_concentration(rng, s.nu, s.z.live_clusters(), s.n);
}

NormalParams eta_conditional(const SamplerState& s, const NetView& y,
                             const Hyperparameters& h) {
  double num = 0.0;
  long carried = 0;
  for (int t = 1; t < s.T; ++t)
    for (int i = 0; i < s.n; ++i)
      for (int j = i + 1; j < s.n; ++j) {
        if (!y.y(t - 1, i, j)) continue;
        ++carried;
        num += s.zeta_at(t, i, j) - s.theta_of(i, t) - s.theta_of(j, t) -
               community_effect(s, i, j);
      }
  const double prec = 1.0 / h.var_eta + static_cast<double>(carried);
  return {num / prec, 1.0 / prec};
}

void step_eta(RandomSource& rng, SamplerState& s, const NetView& y,
              const Hyperparameters& h) {
  const NormalParams p = eta_conditional(s, y, h);
  s.eta = rng.normal(p.mean, p.var);
}

void sweep(RandomSource& rng, SamplerState& s, const NetView& y,
           const Hyperparameters& h) {
  step_zeta(rng, s, y);
  step_z(rng, s, y, h);
  step_beta(rng, s, y, h);
  step_alpha(rng, s);
  step_c(rng, s, y, h);
  step_theta(rng, s, y, h);
  step_nu(rng, s);
  if (s.model == ModelKind::DynamicLag) step_eta(rng, s, y, h);
  s.z.compact();
  s.c.compact();
}

SamplerState initialize_state(RandomSource& rng, const NetView& y,
                              ModelKind model, const Hyperparameters& h) {
  h.validate();
  if (model == ModelKind::Static && y.T() != 1)
    throw std::invalid_argument("static model expects a single snapshot");
  if (model != ModelKind::Static && y.T() < 2)
    throw std::invalid_argument("dynamic models need at least two snapshots");

  SamplerState s;
  s.model = model;
  s.n = y.n();
  s.T = y.T();
  s.nu = Concentration{rng.gamma(h.community_shape, h.community_rate),
                       h.community_shape, h.community_rate};
  s.alpha = Concentration{rng.gamma(h.popularity_shape, h.popularity_rate),
                          h.popularity_shape, h.popularity_rate};
  s.z = crp_prior_draw(rng, s.n, s.nu, h.var_beta);
  s.c = crp_prior_draw(rng, s.c_units(), s.alpha, h.var_theta);
  s.eta = (model == ModelKind::DynamicLag) ? rng.normal(0.0, h.var_eta) : 0.0;
  s.zeta.assign(static_cast<std::size_t>(s.T) * pair_count(s.n), 0.0);
  step_zeta(rng, s, y);
  return s;
}

DynamicNetwork generate_network(RandomSource& rng, const SamplerState& s) {
  DynamicNetwork out;
  out.n = s.n;
  out.T = s.T;
  std::vector<std::uint8_t> prev(pair_count(s.n), 0);
  for (int t = 0; t < s.T; ++t) {
    std::vector<std::uint8_t> cur(pair_count(s.n), 0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < s.n; ++i)
      for (int j = i + 1; j < s.n; ++j) {
        const std::size_t p = pair_index(s.n, i, j);
        // The lag term fires whenever eta is set, not just for DynamicLag
        // states: fits keep eta at zero outside that model, and simulation
        // can then plant carried-edge effects on top of per-time
        // popularities to mimic data that sits outside both dynamic models.
        double mu = s.theta_of(i, t) + s.theta_of(j, t) + community_effect(s, i, j);
        if (t > 0 && prev[p]) mu += s.eta;
        if (rng.uniform() < normal_cdf(mu)) {
          cur[p] = 1;
          edges.emplace_back(i + 1, j + 1);
        }
      }
    out.snapshots.emplace_back(s.n, std::move(edges));
    prev = std::move(cur);
  }
  return out;
}

}  // namespace dcsbm
