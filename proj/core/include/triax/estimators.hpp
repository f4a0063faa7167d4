#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triax/distribution.hpp"
#include "triax/model.hpp"
#include "triax/rng.hpp"

namespace triax {

struct TailEstimate {
  std::string method;  // "hill" | "rank_regression"
  double point = 0.0;
  double std_error = 0.0;
  long long k = 0;
  long long n = 0;
};

/// Default order-statistics count floor(n^(2/3)).
long long default_k(long long n);

/// Hill estimator over the top k order statistics: reciprocal of the mean of
/// log(X_(n-i+1) / X_(n-k)). std_error = point / sqrt(k).
TailEstimate hill(std::vector<double> sample, long long k);

/// Least-squares slope of log empirical survival against log value over the
/// top k points; the negated slope estimates the tail index.
TailEstimate rank_regression(std::vector<double> sample, long long k);

/// Geometric grid with n points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// x^alpha times the empirical survival of sample, at each grid point.
std::vector<double> scaled_survival(const std::vector<double>& sample, double alpha,
                                    const std::vector<double>& grid);

/// Max of the curve over the upper half of the grid (index n/2 onward).
double plateau(const std::vector<double>& curve);

/// Log-log slope of the curve over grid points with x >= max/10 (the last
/// decade); zero-valued points are skipped. NaN when fewer than two usable
/// points remain.
double last_decade_slope(const std::vector<double>& grid, const std::vector<double>& curve);

struct ConstantEstimate {
  double point = 0.0;
  double std_error = 0.0;  // jackknife over 20 path blocks
};

/// Tail constant of a self-dominant coordinate k: Monte Carlo of
/// E[(A_kk W_k + D_k)^a - (A_kk W_k)^a] / (a * E[A_kk^a log A_kk]) with W from
/// the supplied stationary sample and fresh coefficient draws from aux.
/// Errc::wrong_regime when coordinate k's tail comes from elsewhere.
ConstantEstimate goldie_constant(const ModelSpec& spec, int k,
                                 const std::vector<std::vector<double>>& w_sample,
                                 Rng& aux_stream);

struct ConstantsReport {
  std::vector<int> coordinate;      // 0-based
  std::vector<double> constant;
  std::vector<double> std_error;
  std::vector<std::string> method;  // "goldie-direct" | "recursive u*C"
  std::vector<double> u_used;       // NaN for direct entries
  std::vector<std::string> chain;   // e.g. "C_1 = u_1 * C_3"
};

/// Assembles all coordinate constants: direct estimates at self-dominant
/// coordinates, u * C propagation straight to the dominant coordinate
/// elsewhere. Errc::missing_u when a needed input is absent.
ConstantsReport constants_recursive(const TailProfile& profile, const DepGraph& graph,
                                    const std::map<int, ConstantEstimate>& goldie,
                                    const std::map<int, double>& u_values);

struct BreimanReport {
  double alpha = 0.0;
  double M = 0.0;
  double x_moment = 0.0;  // E X^alpha
  double bound = 0.0;     // M * E X^alpha
  double y_sup = 0.0;     // sup over the grid of x^alpha P(Y > x)
  std::vector<double> grid;
  std::vector<double> curve;  // x^alpha P(XY > x)
  double plateau_value = 0.0;
  bool holds = false;  // plateau <= bound
};

/// Product-tail bound check: multiplies each y by an independent X draw and
/// compares the scaled product survival against M * E X^alpha on the upper
/// grid half. Errc::hypothesis_fail when the X-moment or Y-bound hypothesis
/// fails on the inputs.
BreimanReport breiman_check(const DistributionSpec& x_dist, const std::vector<double>& y_sample,
                            double alpha, double M, const std::vector<double>& grid,
                            std::uint64_t seed = 0x5EED);

}  // namespace triax
