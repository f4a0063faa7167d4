#pragma once

#include <string>

#include "triax/rng.hpp"

namespace triax {

/// The nonnegative coefficient laws the model grammar accepts.
///
///   zero                structural zero (absent matrix entry)
///   constant(c)         point mass at c >= 0
///   lognormal(mu,sigma) exp(mu + sigma Z), Z standard normal
///   pareto(a,xm)        survival (x/xm)^-a on [xm, inf)
///   uniform(lo,hi)      uniform on [lo, hi), 0 <= lo < hi
///   garch_entry(a,b)    a Z^2 + b with a,b >= 0, a+b > 0
enum class DistKind { zero, constant, lognormal, pareto, uniform, garch_entry };

struct DistributionSpec {
  DistKind kind = DistKind::zero;
  double p1 = 0.0;  // c | mu | a | lo | a
  double p2 = 0.0;  // - | sigma | xm | hi | b

  bool is_zero() const { return kind == DistKind::zero; }
};

// Factories validate parameters and canonicalize constant(0) to zero, so a
// structurally absent entry and a degenerate-at-zero entry are one thing.
DistributionSpec zero_dist();
DistributionSpec constant(double c);
DistributionSpec lognormal(double mu, double sigma);
DistributionSpec pareto(double a, double xm);
DistributionSpec uniform(double lo, double hi);
DistributionSpec garch_entry(double a, double b);

/// Transform of one base variate into one sample. The base law is uniform(0,1)
/// for constant/pareto/uniform and standard normal for lognormal/garch_entry;
/// keeping the transform pure is what makes batches bit-reproducible.
double sample(const DistributionSpec& dist, double base_variate);

/// Draws the base variate from the stream and applies the transform.
double draw(const DistributionSpec& dist, Rng& rng);

/// E[X^s] for s >= 0 as an extended real: divergent fractional moments
/// (pareto with s >= a) come back as +infinity rather than an error, because
/// the validator treats finiteness as data.
double moment(const DistributionSpec& dist, double s);

/// E[X^s log X]. Throws Errc::divergent when moment(dist, s) is infinite.
/// A law with an atom at 0 yields -infinity at s = 0 (the honest limit).
double log_moment(const DistributionSpec& dist, double s);

/// True when log X is supported on a lattice. For this family that means a
/// point mass: constant, zero, or garch_entry with a = 0.
bool is_arithmetic(const DistributionSpec& dist);

/// Parse / print the model-file literal forms, e.g. "lognormal(-1,1)".
DistributionSpec parse_literal(const std::string& text);
std::string format_literal(const DistributionSpec& dist);

namespace detail {
/// Gauss-Hermite moment path for garch_entry with a chosen node count;
/// exposed so tests can compare the production rule against a 2x refinement.
double garch_moment_gh(double a, double b, double s, int nodes);
double garch_log_moment_gh(double a, double b, double s, int nodes);
}  // namespace detail

}  // namespace triax
