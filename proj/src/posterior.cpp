#include "dcsbm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcsbm {

SimilarityMatrix similarity_matrix(const std::vector<std::vector<int>>& draws) {
  if (draws.empty()) throw std::invalid_argument("similarity_matrix: no draws");
  const int n = static_cast<int>(draws[0].size());
  SimilarityMatrix S(n);
  for (const auto& d : draws) {
    if (static_cast<int>(d.size()) != n)
      throw std::invalid_argument("similarity_matrix: ragged draws");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (d[i] == d[j]) {
          S.at(i, j) += 1.0;
          S.at(j, i) += 1.0;
        }
  }
  const double inv = 1.0 / static_cast<double>(draws.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) S.at(i, j) *= inv;
    S.at(i, i) = 1.0;
  }
  return S;
}

double binder_loss(const std::vector<int>& labels, const SimilarityMatrix& S) {
  const int n = S.n();
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("binder_loss: label count mismatch");
  double loss = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      loss += std::fabs((labels[i] == labels[j] ? 1.0 : 0.0) - S.at(i, j));
  return loss;
}

namespace {

// Relabel to contiguous 1..K in order of first appearance.
std::vector<int> canonical(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  std::vector<int> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int k = -1;
    for (std::size_t s = 0; s < seen.size(); ++s)
      if (seen[s] == labels[i]) { k = static_cast<int>(s); break; }
    if (k < 0) {
      k = static_cast<int>(seen.size());
      seen.push_back(labels[i]);
    }
    out[i] = k + 1;
  }
  return out;
}

int cluster_count(const std::vector<int>& labels) {
  int mx = 0;
  for (int l : canonical(labels)) mx = std::max(mx, l);
  return mx;
}

}  // namespace

std::vector<std::vector<int>> average_linkage_cuts(const SimilarityMatrix& S) {
  const int n = S.n();
  // Active clusters as member lists; distance between clusters is the
  // average of 1 - S over cross pairs.
  std::vector<std::vector<int>> members(n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    members[i] = {i};
    labels[i] = i + 1;
  }
  std::vector<std::vector<int>> cuts;
  cuts.push_back(canonical(labels));
  while (members.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        double d = 0.0;
        for (int i : members[a])
          for (int j : members[b]) d += 1.0 - S.at(i, j);
        d /= static_cast<double>(members[a].size() * members[b].size());
        if (d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    for (int i : members[bb]) members[ba].push_back(i);
    members.erase(members.begin() + bb);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (int i : members[a]) labels[i] = static_cast<int>(a) + 1;
    cuts.push_back(canonical(labels));
  }
  return cuts;
}

void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& fn) {
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0), mx(n, 0);
  for (;;) {
    fn(a);
    int i = n - 1;
    while (i > 0 && a[i] == mx[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      mx[j] = mx[i];
    }
  }
}

HardClustering minimize_binder(const SimilarityMatrix& S,
                               const std::vector<std::vector<int>>& candidates,
                               int exhaustive_max_n) {
  const int n = S.n();
  HardClustering best;
  best.loss = std::numeric_limits<double>::infinity();
  int best_k = 0;
  auto consider = [&](const std::vector<int>& labels) {
    const double loss = binder_loss(labels, S);
    const int k = cluster_count(labels);
    // Strictly better, or equal within rounding slack with fewer clusters.
    if (loss < best.loss - 1e-12 ||
        (loss < best.loss + 1e-12 && k < best_k)) {
      best.labels = canonical(labels);
      best.loss = loss;
      best_k = k;
    }
  };
  for (const auto& cand : candidates) {
    if (static_cast<int>(cand.size()) != n)
      throw std::invalid_argument("minimize_binder: candidate size mismatch");
    consider(cand);
  }
  for (const auto& cut : average_linkage_cuts(S)) consider(cut);
  if (n <= exhaustive_max_n)
    for_each_partition(n, consider);
  return best;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("adjusted_rand_index: size mismatch");
  const std::vector<int> ca = canonical(a), cb = canonical(b);
  const int ka = *std::max_element(ca.begin(), ca.end());
  const int kb = *std::max_element(cb.begin(), cb.end());
  std::vector<long> table(static_cast<std::size_t>(ka) * kb, 0);
  std::vector<long> ra(ka, 0), rb(kb, 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++table[static_cast<std::size_t>(ca[i] - 1) * kb + (cb[i] - 1)];
    ++ra[ca[i] - 1];
    ++rb[cb[i] - 1];
  }
  auto choose2 = [](long m) { return 0.5 * m * (m - 1); };
  double sum_nij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (long v : table) sum_nij += choose2(v);
  for (long v : ra) sum_a += choose2(v);
  for (long v : rb) sum_b += choose2(v);
  const double total = choose2(static_cast<long>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double maxidx = 0.5 * (sum_a + sum_b);
  if (maxidx == expected) return 1.0;  // both partitions degenerate
  return (sum_nij - expected) / (maxidx - expected);
}

double split_psrf(const std::vector<std::vector<double>>& chains) {
  // Split each chain in half, then the usual between/within comparison.
  std::size_t half = std::numeric_limits<std::size_t>::max();
  for (const auto& ch : chains) half = std::min(half, ch.size() / 2);
  if (chains.empty() || half < 2) return 1.0;
  std::vector<std::vector<double>> seq;
  for (const auto& ch : chains) {
    seq.emplace_back(ch.begin(), ch.begin() + half);
    seq.emplace_back(ch.begin() + half, ch.begin() + 2 * half);
  }
  const std::size_t len = half;
  const double m = static_cast<double>(seq.size());
  const double nn = static_cast<double>(len);
  std::vector<double> means;
  double grand = 0.0;
  double W = 0.0;
  for (const auto& s : seq) {
    double mu = 0.0;
    for (double v : s) mu += v;
    mu /= nn;
    means.push_back(mu);
    grand += mu;
    double ss = 0.0;
    for (double v : s) ss += (v - mu) * (v - mu);
    W += ss / (nn - 1.0);
  }
  grand /= m;
  W /= m;
  double B = 0.0;
  for (double mu : means) B += (mu - grand) * (mu - grand);
  B *= nn / (m - 1.0);
  if (W <= 0.0) return 1.0;
  const double var_plus = (nn - 1.0) / nn * W + B / nn;
  return std::sqrt(var_plus / W);
}

namespace {

CountSummary count_summary(const std::vector<long>& pooled) {
  CountSummary cs;
  double total = 0.0, totalsq = 0.0;
  for (long v : pooled) {
    ++cs.histogram[static_cast<int>(v)];
    total += static_cast<double>(v);
    totalsq += static_cast<double>(v) * v;
  }
  const double m = static_cast<double>(pooled.size());
  cs.mean = total / m;
  cs.sd = std::sqrt(std::max(0.0, totalsq / m - cs.mean * cs.mean) *
                    (m > 1 ? m / (m - 1.0) : 1.0));
  long best = -1;
  for (const auto& [value, count] : cs.histogram)
    if (count > best) {
      best = count;
      cs.mode = value;
    }
  return cs;
}

RealSummary real_summary(const std::vector<std::vector<double>>& per_chain) {
  RealSummary rs;
  double sum = 0.0, sumsq = 0.0, pos = 0.0;
  long count = 0;
  for (const auto& ch : per_chain)
    for (double v : ch) {
      sum += v;
      sumsq += v * v;
      if (v > 0.0) pos += 1.0;
      ++count;
    }
  if (count > 0) {
    rs.mean = sum / count;
    const double var = std::max(0.0, sumsq / count - rs.mean * rs.mean);
    rs.sd = std::sqrt(var * (count > 1 ? count / (count - 1.0) : 1.0));
    rs.prob_positive = pos / count;
  }
  rs.psrf = split_psrf(per_chain);
  return rs;
}

}  // namespace

FitSummary summarize_scalars(const std::vector<ChainOutput>& chains, bool has_eta) {
  FitSummary fs;
  fs.has_eta = has_eta;
  std::vector<long> Ks, Ls;
  std::vector<std::vector<double>> alphas, nus, etas;
  for (const auto& ch : chains) {
    std::vector<long> k1, l1;
    std::vector<double> a, v, e;
    for (const auto& d : ch.draws) {
      Ks.push_back(d.K);
      Ls.push_back(d.L);
      k1.push_back(d.K);
      l1.push_back(d.L);
      a.push_back(d.alpha);
      v.push_back(d.nu);
      e.push_back(d.eta);
      ++fs.total_draws;
    }
    if (!k1.empty()) {
      fs.K_chain.push_back(count_summary(k1));
      fs.L_chain.push_back(count_summary(l1));
      fs.alpha_chain.push_back(real_summary({a}));
      fs.nu_chain.push_back(real_summary({v}));
      if (has_eta) fs.eta_chain.push_back(real_summary({e}));
    }
    alphas.push_back(std::move(a));
    nus.push_back(std::move(v));
    etas.push_back(std::move(e));
  }
  if (fs.total_draws == 0) throw std::invalid_argument("summarize_scalars: no draws");
  fs.K = count_summary(Ks);
  fs.L = count_summary(Ls);
  fs.alpha = real_summary(alphas);
  fs.nu = real_summary(nus);
  if (has_eta) fs.eta = real_summary(etas);
  return fs;
}

std::vector<std::vector<int>> collect_z(const std::vector<ChainOutput>& chains) {
  std::vector<std::vector<int>> out;
  for (const auto& ch : chains)
    for (const auto& d : ch.draws) out.push_back(d.z);
  return out;
}

std::vector<std::vector<int>> collect_c(const std::vector<ChainOutput>& chains) {
  std::vector<std::vector<int>> out;
  for (const auto& ch : chains)
    for (const auto& d : ch.draws) out.push_back(d.c);
  return out;
}

RefitResult conditional_refit(const NetView& y, ModelKind model,
                              const Hyperparameters& h,
                              const std::vector<int>& z_labels,
                              const std::vector<int>& c_labels,
                              const McmcConfig& cfg) {
  cfg.validate();
  h.validate();
  if (static_cast<int>(z_labels.size()) != y.n())
    throw std::invalid_argument("refit: need one community label per actor");
  const int c_units =
      (model == ModelKind::DynamicPopularity) ? y.n() * y.T() : y.n();
  if (static_cast<int>(c_labels.size()) != c_units)
    throw std::invalid_argument("refit: popularity labels do not match the unit count");

  const int K = cluster_count(z_labels);
  const int L = cluster_count(c_labels);
  RefitResult out;
  out.beta_mean.assign(K, 0.0);
  out.beta_sd.assign(K, 0.0);
  out.theta_mean.assign(L, 0.0);
  out.theta_sd.assign(L, 0.0);
  std::vector<double> beta_sq(K, 0.0), theta_sq(L, 0.0);
  double eta_sum = 0.0, eta_sq = 0.0;

  for (int ci = 0; ci < cfg.chains; ++ci) {
    RandomSource rng(cfg.seed, static_cast<std::uint64_t>(ci));
    SamplerState s;
    s.model = model;
    s.n = y.n();
    s.T = y.T();
    std::vector<double> bv(K), tv(L);
    for (double& v : bv) v = rng.normal(0.0, h.var_beta);
    for (double& v : tv) v = rng.normal(0.0, h.var_theta);
    s.z = CrpState::from_assignments(z_labels, bv);
    s.c = CrpState::from_assignments(c_labels, tv);
    s.eta = (model == ModelKind::DynamicLag) ? rng.normal(0.0, h.var_eta) : 0.0;
    s.zeta.assign(static_cast<std::size_t>(s.T) * pair_count(s.n), 0.0);
    step_zeta(rng, s, y);
    for (long it = 1; it <= cfg.iterations; ++it) {
      step_zeta(rng, s, y);
      step_beta(rng, s, y, h);
      step_theta(rng, s, y, h);
      if (model == ModelKind::DynamicLag) step_eta(rng, s, y, h);
      if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
        const std::vector<double> bs = s.z.values_contiguous();
        const std::vector<double> ts = s.c.values_contiguous();
        for (int k = 0; k < K; ++k) {
          out.beta_mean[k] += bs[k];
          beta_sq[k] += bs[k] * bs[k];
        }
        for (int l = 0; l < L; ++l) {
          out.theta_mean[l] += ts[l];
          theta_sq[l] += ts[l] * ts[l];
        }
        eta_sum += s.eta;
        eta_sq += s.eta * s.eta;
        ++out.kept;
      }
    }
  }
  if (out.kept == 0) throw std::logic_error("refit: nothing retained");
  const double inv = 1.0 / static_cast<double>(out.kept);
  auto finish = [&](std::vector<double>& mean, std::vector<double>& sd,
                    std::vector<double>& sq) {
    for (std::size_t k = 0; k < mean.size(); ++k) {
      mean[k] *= inv;
      const double var = std::max(0.0, sq[k] * inv - mean[k] * mean[k]);
      sd[k] = std::sqrt(var);
    }
  };
  finish(out.beta_mean, out.beta_sd, beta_sq);
  finish(out.theta_mean, out.theta_sd, theta_sq);
  eta_sum *= inv;
  out.eta_mean = eta_sum;
  out.eta_sd = std::sqrt(std::max(0.0, eta_sq * inv - eta_sum * eta_sum));
  return out;
}

}  // namespace dcsbm
