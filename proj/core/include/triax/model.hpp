#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triax/distribution.hpp"

namespace triax {

/// Upper-triangular affine recursion W_t = A_t W_{t-1} + B_t described by one
/// coefficient law per entry. Entries below the diagonal must be structural
/// zeros; coordinates are 0-based here and 1-based in every file format.
struct ModelSpec {
  int d = 0;
  std::vector<std::vector<DistributionSpec>> A;  // d x d
  std::vector<DistributionSpec> B;               // d

  /// Throws Errc::invalid_model on shape violations (wrong sizes, nonzero
  /// entries below the diagonal, structurally zero diagonal).
  void check_shape() const;
};

/// Direct and transitive coordinate dependence: direct(i,j) iff entry (i,j)
/// is present; reach is the reflexive-transitive closure.
struct DepGraph {
  int d = 0;
  std::vector<std::vector<std::uint8_t>> direct;
  std::vector<std::vector<std::uint8_t>> reach;

  bool reaches(int i, int j) const { return reach[i][j] != 0; }
};

/// Marginal diagonal indices alpha_i, effective indices tilde_alpha_i, and
/// the dominant coordinate j0[i] realizing the minimum over the reach set.
struct TailProfile {
  std::vector<double> alpha;
  std::vector<double> tilde_alpha;
  std::vector<int> j0;

  bool self_dominant(int i) const { return j0[i] == i; }
};

/// The unique s > 0 with E[X^s] = 1. Lognormal gets its explicit root
/// -2 mu / sigma^2; every other law is solved by bracket doubling
/// (cap s = 64) and bisection on the log-moment to 1e-10 absolute.
/// Requires E log X < 0. Throws Errc::no_root / Errc::arithmetic.
double solve_alpha(const DistributionSpec& dist);

DepGraph build_depgraph(const ModelSpec& spec);

/// Effective indices two ways -- the reach-set minimum and the backward
/// recursion over direct successors -- cross-asserted equal. The alphas must
/// be pairwise distinct beyond 1e-6 (Errc::duplicate_indices otherwise).
TailProfile tilde_alpha(const std::vector<double>& alpha, const DepGraph& graph);

/// Convenience: solve every diagonal index, then tilde_alpha.
TailProfile tail_profile(const ModelSpec& spec);

struct ConditionCheck {
  std::string id;      // "T-1" .. "T-8"
  bool checked = false;
  bool pass = false;
  std::string detail;
};

struct LyapunovEvidence {
  double eps = 0.0;
  double rho = 0.0;
  bool sufficient = false;
};

struct ValidationReport {
  std::vector<ConditionCheck> conditions;
  std::optional<TailProfile> profile;       // present when T-4 holds
  std::optional<LyapunovEvidence> lyapunov; // evidence, not part of acceptance
  bool accepted = false;

  const ConditionCheck& condition(const std::string& id) const;
};

/// Evaluates the eight admissibility conditions; failures are report entries,
/// never exceptions.
ValidationReport validate(const ModelSpec& spec);

struct LyapunovSufficiency {
  bool sufficient = false;
  double rho = 0.0;  // spectral radius of the entrywise eps-moment matrix
};

/// Spectral-radius sufficiency check at exponent eps: for upper-triangular
/// patterns the radius is the max diagonal eps-moment. eps must be positive
/// and below every solvable diagonal index (Errc::eps_out_of_range).
LyapunovSufficiency lyapunov_sufficient(const ModelSpec& spec, double eps);

struct LyapunovMcResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long long steps = 0;
  long long paths = 0;
};

/// Monte Carlo top-Lyapunov estimate: averages (1/n) log ||A_0 ... A_{-n+1}||_1
/// over independent paths, with exact power-of-two rescaling of the running
/// product. Deterministic per (seed); workers only change wall time.
LyapunovMcResult lyapunov_mc(const ModelSpec& spec, long long n, long long paths,
                             std::uint64_t seed, int workers = 0);

}  // namespace triax
