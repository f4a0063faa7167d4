#pragma once

#include <vector>

#include "triax/model.hpp"
#include "triax/simulate.hpp"

namespace triax {

/// Upper-triangular CCC-GARCH(1,1) parameters. The squared-volatility vector
/// solves the affine recursion with coefficient entries a Z^2 + b, so the
/// whole tail toolkit applies to it through to_sre.
struct GarchSpec {
  int d = 0;
  std::vector<double> alpha0;              // length d, positive
  std::vector<std::vector<double>> alpha;  // d x d, upper triangular, nonneg
  std::vector<std::vector<double>> beta;   // d x d, upper triangular, nonneg
  bool common_shock = true;

  void check() const;
};

/// The induced squared-volatility recursion. Entry (i,j) becomes
/// garch_entry(alpha_ij, beta_ij), degrading to constant(beta_ij) when
/// alpha_ij = 0 and to a structural zero when both vanish; B_i =
/// constant(alpha0_i). The emitted coefficient law treats entries as
/// independent across (i,j); the shared-shock sampling variant lives in
/// simulate_garch and has the same per-entry marginals.
ModelSpec to_sre(const GarchSpec& g);

struct GarchPath {
  int d = 0;
  long long steps = 0;
  std::vector<double> X;       // steps x d returns, row-major
  std::vector<double> sigma2;  // steps x d squared volatilities, row-major
  double x(long long t, int i) const { return X[t * d + i]; }
  double s2(long long t, int i) const { return sigma2[t * d + i]; }
};

/// One trajectory of length config.horizon after config.burn_in warm-up
/// steps, started from sigma^2 = alpha0. With common_shock set (default) the
/// recursion consumes the same per-coordinate shock that generates the
/// return, so sigma^2 is driven by the realized squared returns; otherwise
/// every coefficient entry draws its own shock and the recursion matches
/// iterate() on to_sre(g) law-for-law.
GarchPath simulate_garch(const GarchSpec& g, const PathConfig& config);

}  // namespace triax
