#include "dcsbm/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcsbm/math.hpp"

namespace dcsbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is absorbing
  for (std::uint64_t k = 0; k < stream; ++k) jump();
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

// Advance 2^128 steps; successive streams never overlap in any run we can
// afford to make.
void RandomSource::jump() {
  static constexpr std::uint64_t JUMP[] = {
      0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
      0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
  std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  for (std::uint64_t word : JUMP)
    for (int b = 0; b < 64; ++b) {
      if (word & (1ULL << b)) {
        s0 ^= s_[0];
        s1 ^= s_[1];
        s2 ^= s_[2];
        s3 ^= s_[3];
      }
      next_u64();
    }
  s_[0] = s0;
  s_[1] = s1;
  s_[2] = s2;
  s_[3] = s3;
}

double RandomSource::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

// Marsaglia polar method; the spare deviate is kept for the next call.
double RandomSource::std_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform() - 1.0;
    v2 = 2.0 * uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v2 * f;
  has_cached_ = true;
  return v1 * f;
}

double RandomSource::normal(double mean, double var) {
  if (var == 0.0) return mean;
  return mean + std::sqrt(var) * std_normal();
}

double RandomSource::exponential() { return -std::log(uniform_pos()); }

// Marsaglia-Tsang squeeze for shape >= 1; the shape < 1 case is boosted
// through gamma(shape+1) and a uniform power.
double RandomSource::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = std_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double RandomSource::beta(double a, double b) {
  for (;;) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    if (x + y > 0.0) return x / (x + y);
  }
}

// Standard normal conditioned on Z > a.  Inverse-CDF in survival space is
// exact and cheap while the tail probability is representable; past that
// the exponential rejection of Robert (Stat. Comput. 1995) takes over with
// acceptance rate above 0.95.
double RandomSource::trunc_normal_lower(double a) {
  if (a < 4.0) {
    const double q = normal_sf(a);
    for (;;) {
      const double z = -inv_normal_cdf(q * uniform_pos());
      if (z > a) return z;
    }
  }
  const double lam = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a + exponential() / lam;
    const double diff = z - lam;
    if (uniform_pos() <= std::exp(-0.5 * diff * diff) && z > a) return z;
  }
}

double RandomSource::trunc_normal(double mean, double lower, double upper) {
  if (!(lower < upper))
    throw std::domain_error("trunc_normal: empty interval");
  const double a = lower - mean;  // standardized bounds
  const double b = upper - mean;
  double z;
  if (a == -kInf && b == kInf) {
    z = std_normal();
  } else if (b == kInf) {
    z = trunc_normal_lower(a);
  } else if (a == -kInf) {
    z = -trunc_normal_lower(-b);
  } else if (a < 0.0 && b > 0.0) {
    // Interval straddles the mode: plain inverse-CDF is well conditioned.
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    do {
      z = inv_normal_cdf(pa + uniform_pos() * (pb - pa));
    } while (!(z > a && z < b));
  } else {
    // Both bounds on one side; work in the nearer tail.
    const bool flip = (b <= 0.0);
    const double lo = flip ? -b : a;
    const double hi = flip ? -a : b;
    const double qlo = normal_sf(lo);
    const double qhi = normal_sf(hi);
    if (qlo - qhi > 1e-280) {
      do {
        z = -inv_normal_cdf(qhi + uniform_pos() * (qlo - qhi));
      } while (!(z > lo && z < hi));
    } else {
      // Tail mass underflows: uniform proposal against the decreasing density.
      for (;;) {
        z = lo + uniform_pos() * (hi - lo);
        if (uniform_pos() <= std::exp(0.5 * (lo * lo - z * z)) && z > lo && z < hi)
          break;
      }
    }
    if (flip) z = -z;
  }
  double out = mean + z;
  // Guard the add against rounding onto a finite bound.
  while (!(out > lower) || !(out < upper)) {
    out = std::nextafter(out, out <= lower ? kInf : -kInf);
  }
  return out;
}

std::size_t RandomSource::categorical_log(std::span<const double> logw) {
  if (logw.empty())
    throw std::invalid_argument("categorical_log: empty weight vector");
  double m = -kInf;
  for (double v : logw) {
    if (std::isnan(v)) throw std::invalid_argument("categorical_log: NaN weight");
    if (v > m) m = v;
  }
  if (m == -kInf)
    throw std::invalid_argument("categorical_log: all weights are zero");
  double total = 0.0;
  for (double v : logw) total += std::exp(v - m);
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double w = std::exp(logw[i] - m);
    if (w > 0.0) last_positive = i;
    acc += w;
    if (w > 0.0 && u < acc) return i;
  }
  return last_positive;  // u landed on the rounding slack at the top
}

}  // namespace dcsbm
