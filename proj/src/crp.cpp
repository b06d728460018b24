#include "dcsbm/crp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcsbm/rng.hpp"

namespace dcsbm {

CrpState CrpState::single_cluster(int units, double value) {
  CrpState s;
  s.assign_.assign(units, 0);
  s.count_ = {units};
  s.value_ = {value};
  s.live_ = 1;
  return s;
}

CrpState CrpState::all_pending(int units) {
  CrpState s;
  s.assign_.assign(units, -1);
  return s;
}

CrpState CrpState::from_assignments(const std::vector<int>& labels,
                                    const std::vector<double>& values) {
  CrpState s;
  s.assign_.assign(labels.size(), -1);
  std::vector<int> seen;  // label -> slot, in order of first appearance
  for (std::size_t u = 0; u < labels.size(); ++u) {
    int slot = -1;
    for (std::size_t k = 0; k < seen.size(); ++k)
      if (seen[k] == labels[u]) { slot = static_cast<int>(k); break; }
    if (slot < 0) {
      slot = static_cast<int>(seen.size());
      seen.push_back(labels[u]);
      s.count_.push_back(0);
      s.value_.push_back(0.0);
    }
    s.assign_[u] = slot;
    ++s.count_[slot];
  }
  if (values.size() != seen.size())
    throw std::invalid_argument("from_assignments: need one value per cluster");
  s.value_ = values;
  s.live_ = static_cast<int>(seen.size());
  return s;
}

bool CrpState::remove_if_singleton(int unit) {
  const int slot = assign_.at(unit);
  if (slot < 0) throw std::logic_error("remove_if_singleton: unit already pending");
  if (count_[slot] > 1) return false;
  count_[slot] = 0;
  free_.push_back(slot);
  --live_;
  assign_[unit] = -1;
  return true;
}

void CrpState::move(int unit, int slot) {
  if (count_.at(slot) == 0) throw std::logic_error("move: target slot is dead");
  const int old = assign_.at(unit);
  if (old == slot) return;
  if (old >= 0) {
    if (--count_[old] == 0) {
      free_.push_back(old);
      --live_;
    }
  }
  assign_[unit] = slot;
  ++count_[slot];
}

int CrpState::assign_new_cluster(int unit, double v) {
  const int old = assign_.at(unit);
  if (old >= 0) {
    if (--count_[old] == 0) {
      free_.push_back(old);
      --live_;
    }
  }
  int slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
  } else {
    slot = static_cast<int>(count_.size());
    count_.push_back(0);
    value_.push_back(0.0);
  }
  count_[slot] = 1;
  value_[slot] = v;
  assign_[unit] = slot;
  ++live_;
  return slot;
}

void CrpState::compact() {
  std::vector<int> order;  // old slot in order of first appearance
  std::vector<int> remap(count_.size(), -1);
  for (int a : assign_) {
    if (a < 0) throw std::logic_error("compact: pending unit");
    if (remap[a] < 0) {
      remap[a] = static_cast<int>(order.size());
      order.push_back(a);
    }
  }
  std::vector<int> ncount(order.size());
  std::vector<double> nvalue(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    ncount[k] = count_[order[k]];
    nvalue[k] = value_[order[k]];
  }
  for (int& a : assign_) a = remap[a];
  count_ = std::move(ncount);
  value_ = std::move(nvalue);
  free_.clear();
  live_ = static_cast<int>(order.size());
}

std::vector<int> CrpState::labels_contiguous() const {
  std::vector<int> remap(count_.size(), 0);
  std::vector<int> out(assign_.size());
  int next = 0;
  for (std::size_t u = 0; u < assign_.size(); ++u) {
    const int a = assign_[u];
    if (a < 0) throw std::logic_error("labels_contiguous: pending unit");
    if (remap[a] == 0) remap[a] = ++next;
    out[u] = remap[a];
  }
  return out;
}

std::vector<double> CrpState::values_contiguous() const {
  std::vector<int> remap(count_.size(), 0);
  std::vector<double> out;
  int next = 0;
  for (int a : assign_) {
    if (a < 0) throw std::logic_error("values_contiguous: pending unit");
    if (remap[a] == 0) {
      remap[a] = ++next;
      out.push_back(value_[a]);
    }
  }
  return out;
}

bool CrpState::counts_consistent() const {
  std::vector<int> recount(count_.size(), 0);
  for (int a : assign_)
    if (a >= 0) ++recount[a];
  int lv = 0;
  for (std::size_t k = 0; k < count_.size(); ++k) {
    if (recount[k] != count_[k] && count_[k] != 0) return false;
    if (count_[k] > 0) ++lv;
  }
  return lv == live_;
}

CrpWeights crp_prior_weights(const CrpState& state, int unit,
                             const Concentration& conc) {
  CrpWeights w;
  const int own = state.assignment(unit);
  for (int k = 0; k < state.slots(); ++k) {
    if (!state.live(k)) continue;
    const int m = state.count(k) - (k == own ? 1 : 0);
    w.slot.push_back(k);
    w.weight.push_back(static_cast<double>(m));
  }
  w.new_cluster_weight = conc.value;
  return w;
}

double escobar_west_odds(double prior_shape, double prior_rate, int k_live,
                         int n_units, double aux_gamma) {
  // pi/(1-pi) = (a + k - 1) / (n (b - log g))
  return (prior_shape + k_live - 1.0) /
         (n_units * (prior_rate - std::log(aux_gamma)));
}

Concentration update_concentration(RandomSource& rng, const Concentration& conc,
                                   int k_live, int n_units) {
  if (k_live < 1 || n_units < 1)
    throw std::invalid_argument("update_concentration: empty partition");
  const double g = rng.beta(conc.value + 1.0, static_cast<double>(n_units));
  const double odds = escobar_west_odds(conc.prior_shape, conc.prior_rate,
                                        k_live, n_units, g);
  const double pi = odds / (1.0 + odds);
  const double rate = conc.prior_rate - std::log(g);
  const double shape =
      (rng.uniform() < pi) ? conc.prior_shape + k_live
                           : conc.prior_shape + k_live - 1.0;
  Concentration out = conc;
  out.value = rng.gamma(shape, rate);
  return out;
}

CrpState crp_prior_draw(RandomSource& rng, int units, const Concentration& conc,
                        double value_var, double value_mean) {
  CrpState s = CrpState::all_pending(units);
  for (int u = 0; u < units; ++u) {
    const CrpWeights w = crp_prior_weights(s, u, conc);
    std::vector<double> logw;
    logw.reserve(w.weight.size() + 1);
    for (double m : w.weight)
      logw.push_back(m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity());
    logw.push_back(std::log(w.new_cluster_weight));
    const std::size_t pick = rng.categorical_log(logw);
    if (pick == w.slot.size())
      s.assign_new_cluster(u, rng.normal(value_mean, value_var));
    else
      s.move(u, w.slot[pick]);
  }
  return s;
}

}  // namespace dcsbm
