#pragma once

#include <cstdint>
#include <vector>

#include "dcsbm/model.hpp"

namespace dcsbm {

struct McmcConfig {
  long iterations = 10000;  // total sweeps per chain
  long burn_in = 5000;
  long thin = 1;            // keep every thin-th sweep after burn-in
  int chains = 3;
  std::uint64_t seed = 1;
  int jobs = 0;  // worker threads; 0 = one per chain up to the hardware
  void validate() const;
  long kept_per_chain() const { return (iterations - burn_in) / thin; }
};

// One retained sweep.  Labels are contiguous 1..K / 1..L in order of first
// appearance; the coefficient vectors are aligned with those labels.
struct Draw {
  int K = 0, L = 0;
  double alpha = 0.0, nu = 0.0, eta = 0.0;
  std::vector<int> z;             // n entries
  std::vector<int> c;             // n, or n*T time-major
  std::vector<double> beta_star;  // K entries
  std::vector<double> theta_star; // L entries
};

struct ChainOutput {
  int chain_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double wall_seconds = 0.0;
  std::vector<Draw> draws;
};

Draw record_draw(const SamplerState& s);

// Independent chains on seed streams seed/0, seed/1, ...; runs them on
// cfg.jobs worker threads.  Output order matches chain index regardless
// of scheduling.
std::vector<ChainOutput> run_chains(const NetView& y, ModelKind model,
                                    const Hyperparameters& h,
                                    const McmcConfig& cfg);

}  // namespace dcsbm
