#pragma once

#include <cstdint>
#include <vector>

#include "triax/model.hpp"
#include "triax/rng.hpp"

namespace triax {

/// Knobs for path-based operations. burn_in drives stationary sampling and
/// the decomposition window; truncation is the stored realization window
/// length where one is materialized; horizon is the trace/estimation horizon.
struct PathConfig {
  long long burn_in = 300;
  long long horizon = 10;
  long long truncation = 512;
  std::uint64_t seed = 0x5EED;
  long long paths = 1;
  int workers = 0;  // 0: TRIAX_WORKERS env or hardware

  void check() const;
};

/// One stored draw window (A_t, B_t) for t in {0, -1, ..., -(T-1)};
/// slot k holds time t = -k. Products and path sums read from here.
struct Realization {
  int d = 0;
  long long window = 0;
  std::vector<double> A;  // window * d * d, row-major per slot
  std::vector<double> B;  // window * d

  double a(long long k, int i, int j) const { return A[(k * d + i) * d + j]; }
  double b(long long k, int i) const { return B[k * d + i]; }
};

/// Draws a window of length T. Entry draw order inside a time step is fixed
/// (A row-major over present entries, then B), part of the determinism
/// contract.
Realization draw_realization(const ModelSpec& spec, long long T, Rng& rng);

/// Exact forward recursion from w0; returns all steps-many successor states.
/// Throws Errc::overflow when a component leaves the floating range.
std::vector<std::vector<double>> iterate(const ModelSpec& spec, const std::vector<double>& w0,
                                         long long steps, Rng& rng);

/// One stationary draw per path: forward-iterate from zero through burn_in
/// steps. The omitted series tail beyond burn_in has geometrically decaying
/// effective-index moment, so burn_in controls the bias directly.
std::vector<std::vector<double>> stationary_sample(const ModelSpec& spec, const PathConfig& config);

/// Entry (i,j) of A_0 A_{-1} ... A_{-s+1}, running product with power-of-two
/// rescaling once an entry leaves [1e-300, 1e300]. 0 <= s <= window.
double pi_entry(const Realization& real, int i, int j, long long s);

/// Combinatorial oracle for pi_entry: explicit sum over all admissible
/// non-decreasing index sequences from i to j of length s. When
/// first_step_off_diagonal is set, sequences with h(1) = i are excluded (the
/// restricted family used by the B-carrying sum). Bounds d <= 8, s <= 12
/// (Errc::too_large beyond).
double pi_entry_enum(const Realization& real, int i, int j, long long s,
                     bool first_step_off_diagonal = false);

/// One path of the stationary-coordinate decomposition at horizon s with
/// split s = s1 + s2. All parts are computed by their defining formulas from
/// one realization window; the recorded identities (see fields) hold up to
/// floating roundoff.
struct DecompositionTrace {
  int ell = 0;           // decomposed coordinate
  int j0 = 0;            // dominant coordinate
  long long s = 0;       // horizon
  long long s1 = 0, s2 = 0;
  long long truncation_level = 0;  // window length behind W_{l,0}

  double Q_F = 0;   // first s series terms
  double Q_T = 0;   // series tail: diag product times W_{l,-s}
  double Q_W = 0;   // W-carrying part; Q_F = Q_W + Q_B
  double Q_B = 0;   // B-carrying part
  double QpW = 0;   // Q_W restricted to j reaching j0; Q_W = QpW + QppW
  double QppW = 0;  // complement
  double QstarW = 0;  // induction remainder at the split (signed)
  double R = 0;       // W_{l,0} - pi_{l j0}(s) W_{j0,-s} (signed)
  double pi_lj0 = 0;
  double W_j0_ms = 0;  // W_{j0,-s}
  double W_l_0 = 0;

  // Same parts at horizon s1, plus R rebuilt from them:
  // R_alt = QppW_s1 + QstarW + Q_B_s1 + Q_T_s1.
  double QppW_s1 = 0, Q_B_s1 = 0, Q_T_s1 = 0;
  double R_alt = 0;
};

/// Batch of decomposition traces, one per path. Requires a dominated
/// coordinate (tilde alpha < alpha, Errc::not_dominated otherwise).
/// split_s1 <= 0 picks the symmetric default s1 = s - s/2.
std::vector<DecompositionTrace> decompose(const ModelSpec& spec, int ell, long long s,
                                          const PathConfig& config, long long split_s1 = 0);

/// The propagation-factor sequence u(s) = E[pi_{l j0}(s)^{alpha_j0}],
/// estimated with common random numbers: each path weights pi(s) by its own
/// remaining diagonal factors up to s_max, which leaves the mean unbiased,
/// makes the estimate sequence non-decreasing path-wise (the monotonicity
/// the theory asserts), and lands exactly on the plain estimator at s_max.
struct USequence {
  int ell = 0;
  int j0 = 0;
  double alpha_j0 = 0;
  std::vector<long long> s;        // 1..s_max
  std::vector<double> estimate;    // non-decreasing
  std::vector<double> std_error;
  bool converged = false;          // relative change over last 20% below 1%
  bool pathwise_monotone = false;  // pi(s+1) >= pi(s) A_{j0j0,-s} on all paths

  /// Empirical first s with E[pi_{l j}(s)^{alpha_j0}] below the final u
  /// estimate, for each intermediate coordinate j (reported, not asserted).
  std::vector<std::pair<int, long long>> first_s_below_u;

  double u() const { return estimate.back(); }
};

USequence u_sequence(const ModelSpec& spec, int ell, long long s_max, const PathConfig& config);

}  // namespace triax
