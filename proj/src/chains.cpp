#include "dcsbm/chains.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dcsbm {

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("mcmc: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("mcmc: burn-in must lie inside the run");
  if (thin < 1) throw std::invalid_argument("mcmc: thin must be at least 1");
  if (chains < 1) throw std::invalid_argument("mcmc: need at least one chain");
  if (jobs < 0) throw std::invalid_argument("mcmc: jobs must be nonnegative");
}

Draw record_draw(const SamplerState& s) {
  Draw d;
  d.K = s.z.live_clusters();
  d.L = s.c.live_clusters();
  d.alpha = s.alpha.value;
  d.nu = s.nu.value;
  d.eta = s.eta;
  d.z = s.z.labels_contiguous();
  d.c = s.c.labels_contiguous();
  d.beta_star = s.z.values_contiguous();
  d.theta_star = s.c.values_contiguous();
  return d;
}

std::vector<ChainOutput> run_chains(const NetView& y, ModelKind model,
                                    const Hyperparameters& h,
                                    const McmcConfig& cfg) {
  cfg.validate();
  h.validate();
  std::vector<ChainOutput> out(cfg.chains);

  auto run_one = [&](int ci) {
    const auto t0 = std::chrono::steady_clock::now();
    RandomSource rng(cfg.seed, static_cast<std::uint64_t>(ci));
    SamplerState s = initialize_state(rng, y, model, h);
    ChainOutput& co = out[ci];
    co.chain_index = ci;
    co.seed = cfg.seed;
    co.stream = static_cast<std::uint64_t>(ci);
    co.draws.reserve(cfg.kept_per_chain());
    for (long it = 1; it <= cfg.iterations; ++it) {
      sweep(rng, s, y, h);
      if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0)
        co.draws.push_back(record_draw(s));
    }
    co.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                  : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers > static_cast<unsigned>(cfg.chains))
    workers = static_cast<unsigned>(cfg.chains);

  if (workers == 1) {
    for (int ci = 0; ci < cfg.chains; ++ci) run_one(ci);
    return out;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int ci = next.fetch_add(1);
        if (ci >= cfg.chains) return;
        try {
          run_one(ci);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace dcsbm
