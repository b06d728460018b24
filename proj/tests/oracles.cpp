#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

double phi_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double mills(double a) {
  if (a < 0.0) throw std::invalid_argument("mills: need a >= 0");
  if (a < 2.0) {
    // The continued fraction converges slowly near 0; integrate instead.
    double tail = simpson(phi_pdf, a, a + 40.0, 40000);
    return tail / phi_pdf(a);
  }
  // Laplace continued fraction, evaluated backward.
  double t = 0.0;
  for (int k = 200; k >= 1; --k) t = k / (a + t);
  return 1.0 / (a + t);
}

// Tail pieces go through the Mills ratio so the small side keeps relative
// accuracy; only there does quadrature lose everything to rounding.
double phi_cdf(double x) {
  if (x <= -2.0) return phi_pdf(x) * mills(-x);
  if (x >= 2.0) return 1.0 - phi_pdf(x) * mills(x);
  return 0.5 + simpson(phi_pdf, 0.0, x, 20000);
}

double phi_sf(double x) {
  if (x >= 2.0) return phi_pdf(x) * mills(x);
  if (x <= -2.0) return 1.0 - phi_pdf(x) * mills(-x);
  return 0.5 - simpson(phi_pdf, 0.0, x, 20000);
}

double tn_lower_mean(double mu) {
  // X ~ N(mu,1) truncated to (0, inf): mean = mu + phi(mu)/Phi(mu)... with
  // alpha = -mu: mean = mu + phi(alpha)/(1 - Phi(alpha)) = mu + 1/mills(-mu)
  // when -mu >= 0; for mu > 0 use the direct ratio.
  const double alpha = -mu;
  if (alpha >= 0.0) return mu + 1.0 / mills(alpha);
  return mu + phi_pdf(alpha) / phi_sf(alpha);
}

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // series expansion
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // continued fraction for Q, then complement
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return gamma_p(shape, rate * x);
}

double chisq_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * df, 0.5 * x);
}

Chi2Result chi2_two_sample(const std::map<int, long>& a, const std::map<int, long>& b) {
  int lo = 1 << 30, hi = -(1 << 30);
  for (const auto& [k, v] : a) { lo = std::min(lo, k); hi = std::max(hi, k); }
  for (const auto& [k, v] : b) { lo = std::min(lo, k); hi = std::max(hi, k); }
  if (hi < lo) throw std::invalid_argument("chi2_two_sample: empty histograms");

  std::vector<double> ca, cb;
  for (int k = lo; k <= hi; ++k) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    ca.push_back(ia == a.end() ? 0.0 : static_cast<double>(ia->second));
    cb.push_back(ib == b.end() ? 0.0 : static_cast<double>(ib->second));
  }
  double na = 0.0, nb = 0.0;
  for (double v : ca) na += v;
  for (double v : cb) nb += v;
  const double total = na + nb;

  // Merge adjacent bins until every expected count is >= 5 in both rows.
  auto expected_ok = [&](double pooled) {
    return na * pooled / total >= 5.0 && nb * pooled / total >= 5.0;
  };
  std::vector<double> ma, mb;
  double acca = 0.0, accb = 0.0;
  for (size_t i = 0; i < ca.size(); ++i) {
    acca += ca[i];
    accb += cb[i];
    if (expected_ok(acca + accb)) {
      ma.push_back(acca);
      mb.push_back(accb);
      acca = accb = 0.0;
    }
  }
  if (acca + accb > 0.0) {
    if (!ma.empty() && !expected_ok(acca + accb)) {
      ma.back() += acca;
      mb.back() += accb;
    } else {
      ma.push_back(acca);
      mb.push_back(accb);
    }
  }

  Chi2Result r;
  if (ma.size() < 2) {  // everything collapsed into one bin: no evidence either way
    r.df = 0;
    r.pvalue = 1.0;
    return r;
  }
  for (size_t i = 0; i < ma.size(); ++i) {
    const double pooled = (ma[i] + mb[i]) / total;
    const double ea = na * pooled;
    const double eb = nb * pooled;
    r.stat += (ma[i] - ea) * (ma[i] - ea) / ea;
    r.stat += (mb[i] - eb) * (mb[i] - eb) / eb;
  }
  r.df = static_cast<int>(ma.size()) - 1;
  r.pvalue = chisq_sf(r.stat, r.df);
  return r;
}

double ks_pvalue(double d, double n_eff) {
  const double rt = std::sqrt(n_eff);
  const double lam = (rt + 0.12 + 0.11 / rt) * d;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * 2.0 * std::exp(-2.0 * k * k * lam * lam);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return ks_pvalue(d, na * nb / (na + nb));
}

double ks_one_sample_p(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::fabs(f - i / n));
    d = std::max(d, std::fabs((i + 1) / n - f));
  }
  return ks_pvalue(d, n);
}

void all_partitions(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int maxv) {
    if (i == n) {
      fn(a);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(maxv, v));
    }
  };
  if (n > 0) rec(1, 0);  // a[0] pinned to 0
  else fn(a);
}

}  // namespace oracle
