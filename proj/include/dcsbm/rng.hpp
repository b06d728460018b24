#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace dcsbm {

// Self-contained random source: xoshiro256++ with jump-based substreams so
// parallel chains draw from provably disjoint stretches of the period.
// Every sampler below is hand-rolled on top of next_u64() which keeps a
// given (seed, stream) pair bit-for-bit reproducible across platforms,
// something the libstdc++ distribution objects do not guarantee.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1)

  double normal(double mean, double var);
  double std_normal();
  double exponential();  // unit rate
  // Shape/rate parameterization, mean = shape/rate.
  double gamma(double shape, double rate);
  double beta(double a, double b);

  // N(mean, 1) restricted to (lower, upper); either bound may be infinite.
  // Returns a value strictly inside the interval.
  double trunc_normal(double mean, double lower, double upper);

  // Draw an index proportional to exp(logw[i]).  Weights may span hundreds
  // of orders of magnitude; -inf marks an impossible cell.
  std::size_t categorical_log(std::span<const double> logw);

 private:
  std::array<std::uint64_t, 4> s_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;

  void jump();
  double trunc_normal_lower(double a);  // standard normal given Z > a
};

}  // namespace dcsbm
