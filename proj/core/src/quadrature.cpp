#include "triax/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace triax {

namespace {

const long double kPi = 3.14159265358979323846264338327950288L;

struct HermEval {
  long double value;  // orthonormal Hermite value at z
  long double slope;  // sqrt(2n) times the degree-(n-1) value
};

HermEval herm_eval(int n, long double z) {
  long double p1 = 1.0L / std::sqrt(std::sqrt(kPi));
  long double p2 = 0.0L;
  for (int j = 1; j <= n; ++j) {
    long double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt((j - 1.0L) / j) * p3;
  }
  return {p1, std::sqrt(2.0L * n) * p2};
}

// Roots found by marching down from the turning point sqrt(2n+1) in steps
// shorter than the local root spacing (WKB density in the bulk, an Airy-scale
// cap at the edge), so every sign change brackets exactly one root. Bisection
// plus guarded Newton then refines each bracket. Long double throughout so
// the n=400 refinement rule keeps finite weight logs.
GaussHermiteRule compute_rule(int n) {
  GaussHermiteRule rule;
  rule.x.assign(n, 0.0);
  rule.log_w.assign(n, 0.0);

  const long double t = 2.0L * n + 1.0L;
  const long double edge_cap = 0.9L * std::pow(t, -1.0L / 6.0L);
  int m = (n + 1) / 2;
  long double upper = std::sqrt(t);  // above every root; the value there is > 0

  for (int i = 0; i < m; ++i) {
    // Sign of the polynomial between root i-1 and root i.
    const bool gap_positive = (i % 2) == 0;

    long double hi = upper;
    long double lo = hi;
    bool bracketed = false;
    for (int step = 0; step < 16 * n + 64 && !bracketed; ++step) {
      long double h =
          std::min(0.45L * kPi / std::sqrt(std::max(t - lo * lo, 1.0L)), edge_cap);
      lo -= h;
      if (lo < -std::sqrt(t) - 1.0L)
        throw std::logic_error("gauss_hermite: root bracketing ran past the spectrum");
      long double v = herm_eval(n, lo).value;
      if ((v > 0.0L) != gap_positive) {
        bracketed = true;
      } else {
        hi = lo;
      }
    }
    if (!bracketed) throw std::logic_error("gauss_hermite: failed to bracket a root");

    for (int it = 0; it < 30; ++it) {
      long double mid = 0.5L * (lo + hi);
      if ((herm_eval(n, mid).value > 0.0L) == gap_positive)
        hi = mid;
      else
        lo = mid;
    }

    long double z = 0.5L * (lo + hi);
    for (int it = 0; it < 60; ++it) {
      HermEval e = herm_eval(n, z);
      if ((e.value > 0.0L) == gap_positive)
        hi = z;
      else
        lo = z;
      long double next = z - e.value / e.slope;
      if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
      if (std::fabs(next - z) <= 1e-19L * (1.0L + std::fabs(next))) {
        z = next;
        break;
      }
      z = next;
    }
    if (n % 2 == 1 && i == m - 1) z = 0.0L;  // odd degree: the central root is exact

    long double pp = herm_eval(n, z).slope;
    long double log_w = std::log(2.0L) - 2.0L * std::log(std::fabs(pp));
    // Largest roots first; mirror nodes share the weight.
    rule.x[i] = static_cast<double>(z);
    rule.log_w[i] = static_cast<double>(log_w);
    rule.x[n - 1 - i] = static_cast<double>(-z);
    rule.log_w[n - 1 - i] = static_cast<double>(log_w);

    upper = z;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double log_sum_exp(const std::vector<double>& terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms)
    if (t > m) m = t;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms)
    if (std::isfinite(t)) s += std::exp(t - m);
  return m + std::log(s);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

}  // namespace triax
