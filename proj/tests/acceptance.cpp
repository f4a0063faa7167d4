// Acceptance harness: ten end-to-end criteria, one verdict line each.
// Exits nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "triax/distribution.hpp"
#include "triax/error.hpp"
#include "triax/estimators.hpp"
#include "triax/garch.hpp"
#include "triax/model.hpp"
#include "triax/model_io.hpp"
#include "triax/rng.hpp"
#include "triax/simulate.hpp"

#ifndef TRIAX_CLI_BIN
#error "TRIAX_CLI_BIN must be defined by the build"
#endif
#ifndef TRIAX_MODELS_DIR
#error "TRIAX_MODELS_DIR must be defined by the build"
#endif

namespace {

using namespace triax;

int failures = 0;

void report(int num, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", num, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string model_path(const std::string& name) {
  return std::string(TRIAX_MODELS_DIR) + "/" + name;
}

std::string run_cli(const std::string& args, int* status) {
  std::string cmd = std::string("\"") + TRIAX_CLI_BIN + "\" " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *status = -1;
    return out;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
  int rc = pclose(pipe);
  *status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

double rel_gap(double lhs, double rhs) {
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) / scale;
}

double quantile_of(std::vector<double> sorted, double p) {
  std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1));
  return sorted[idx];
}

// ---------------------------------------------------------------------------
// 1: the command-line index report on the five-coordinate pattern.

void criterion_1() {
  int status = -1;
  std::string out = run_cli("indices --model \"" + model_path("example34.model") + "\"", &status);
  bool ok = status == 0;
  std::string detail = "cli exit " + std::to_string(status);
  if (ok) {
    nlohmann::json j = nlohmann::json::parse(out, nullptr, false);
    ok = !j.is_discarded() && j["tilde_alpha"] == nlohmann::json({1.0, 1.0, 2.0, 1.0, 4.0}) &&
         j["j0"] == nlohmann::json({4, 4, 3, 4, 5});
    detail = ok ? "tilde_alpha = (1,1,2,1,4), j0 = (4,4,3,4,5)" : "unexpected profile " + out;
  }
  report(1, "command-line indices on the five-coordinate pattern", ok, detail);
}

// ---------------------------------------------------------------------------
// 2: the backward recursion and the reach-set minimum agree exactly on
//    1000 random patterns with random, pairwise-distinct indices.

void criterion_2() {
  Rng rng(2718, 1);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform01() * 9);
    std::vector<double> alpha(d);
    for (bool distinct = false; !distinct;) {
      for (int i = 0; i < d; ++i) alpha[i] = 0.5 + 8.0 * rng.uniform01();
      distinct = true;
      for (int i = 0; i < d && distinct; ++i)
        for (int j = i + 1; j < d; ++j)
          if (std::abs(alpha[i] - alpha[j]) < 1e-5) distinct = false;
    }
    ModelSpec spec;
    spec.d = d;
    spec.A.assign(d, std::vector<DistributionSpec>(d, zero_dist()));
    spec.B.assign(d, constant(1.0));
    for (int i = 0; i < d; ++i) {
      spec.A[i][i] = lognormal(-1.0, 1.0);
      for (int j = i + 1; j < d; ++j)
        if (rng.uniform01() < 0.35) spec.A[i][j] = constant(1.0);
    }
    DepGraph graph = build_depgraph(spec);
    TailProfile p = tilde_alpha(alpha, graph);

    for (int i = 0; i < d; ++i) {
      // Reach-set minimum recomputed with a plain stack walk.
      std::vector<char> seen(d, 0);
      std::vector<int> stack = {i};
      double best = alpha[i];
      int arg = i;
      while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        if (seen[c]) continue;
        seen[c] = 1;
        if (alpha[c] < best) {
          best = alpha[c];
          arg = c;
        }
        for (int j = 0; j < d; ++j)
          if (graph.direct[c][j] && !seen[j]) stack.push_back(j);
      }
      if (p.tilde_alpha[i] != best || p.j0[i] != arg) ++bad;
    }
  }
  report(2, "two index routes agree exactly on 1000 random patterns", bad == 0,
         std::to_string(bad) + " mismatched coordinates");
}

// ---------------------------------------------------------------------------
// 3: running matrix products against exhaustive sequence enumeration.

void criterion_3() {
  Rng meta(3141, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + static_cast<int>(meta.uniform01() * 3);
    ModelSpec spec;
    spec.d = d;
    spec.A.assign(d, std::vector<DistributionSpec>(d, zero_dist()));
    spec.B.assign(d, constant(1.0));
    for (int i = 0; i < d; ++i) {
      spec.A[i][i] = lognormal(-0.8 - 0.2 * i, 0.5);
      for (int j = i + 1; j < d; ++j) {
        double pick = meta.uniform01();
        if (pick < 0.45) continue;
        spec.A[i][j] = pick < 0.75 ? uniform(0.2, 1.2) : pareto(2.5, 0.3);
      }
    }
    Rng rng(1618, static_cast<std::uint64_t>(trial));
    Realization real = draw_realization(spec, 6, rng);
    for (long long s = 0; s <= 6; ++s)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double fast = pi_entry(real, i, j, s);
          double slow = pi_entry_enum(real, i, j, s);
          if (slow == 0.0) {
            if (fast != 0.0) worst = 1.0;
          } else {
            worst = std::max(worst, std::abs(fast - slow) / std::abs(slow));
          }
        }
  }
  report(3, "matrix products match exhaustive enumeration on 200 windows", worst <= 1e-10,
         "max relative gap " + std::to_string(worst));
}

// ---------------------------------------------------------------------------
// 4: path-wise decomposition identities on 1000 traces of the 3-d
//    full-triangular lognormal model.

void criterion_4() {
  ModelSpec spec = load_model_file(model_path("triangular3.model")).resolve();
  PathConfig config;
  config.paths = 1000;
  std::vector<DecompositionTrace> traces = decompose(spec, 0, 8, config);
  double worst_split = 0.0, worst_anchor = 0.0;
  bool nonneg = true;
  for (const DecompositionTrace& t : traces) {
    worst_split = std::max(worst_split, rel_gap(t.Q_F, t.Q_W + t.Q_B));
    worst_anchor = std::max(worst_anchor, rel_gap(t.W_l_0, t.pi_lj0 * t.W_j0_ms + t.R));
    nonneg = nonneg && t.Q_F >= 0.0 && t.Q_T >= 0.0 && t.Q_W >= 0.0 && t.Q_B >= 0.0 &&
             t.QpW >= 0.0 && t.QppW >= 0.0;
  }
  bool ok = worst_split <= 1e-8 && worst_anchor <= 1e-8 && nonneg;
  report(4, "decomposition identities hold on 1000 traces", ok,
         "max relative gaps: series split " + std::to_string(worst_split) + ", anchor " +
             std::to_string(worst_anchor) + (nonneg ? "" : ", negative part seen"));
}

// ---------------------------------------------------------------------------
// 5: the propagation factor is monotone path-wise on 100000 paths and its
//    common-random-number estimate sequence is non-decreasing.

void criterion_5() {
  ModelSpec spec = load_model_file(model_path("bivariate.model")).resolve();
  PathConfig config;
  config.paths = 100000;
  USequence u = u_sequence(spec, 0, 30, config);
  bool seq_ok = true;
  for (std::size_t k = 1; k < u.estimate.size(); ++k)
    seq_ok = seq_ok && u.estimate[k] >= u.estimate[k - 1] * (1.0 - 1e-12);
  bool ok = u.pathwise_monotone && seq_ok;
  report(5, "propagation factor monotone on 100000 paths to s = 30", ok,
         std::string("pathwise ") + (u.pathwise_monotone ? "clean" : "violated") +
             ", estimates " + (seq_ok ? "non-decreasing" : "decreasing somewhere") +
             ", u = " + std::to_string(u.u()));
}

// ---------------------------------------------------------------------------
// 6: both coordinates of the bivariate model estimate the effective index 2,
//    the dominated coordinate sits far below its marginal index 4, and the
//    scaled survival curves flatten.

void criterion_6() {
  ModelSpec spec = load_model_file(model_path("bivariate.model")).resolve();
  PathConfig config;
  config.paths = 200000;
  std::vector<std::vector<double>> batch = stationary_sample(spec, config);
  long long n = static_cast<long long>(batch.size());
  long long k = default_k(n);

  bool ok = true;
  std::string detail;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> col(n);
    for (long long p = 0; p < n; ++p) col[p] = batch[p][i];
    TailEstimate h = hill(col, k);
    bool in_band = h.point >= 1.6 && h.point <= 2.4;
    ok = ok && in_band;
    if (i == 0) ok = ok && (h.point + 2.0 * h.std_error < 3.0);

    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> grid = log_grid(quantile_of(sorted, 0.95),
                                        quantile_of(sorted, 0.9995), 40);
    double slope = last_decade_slope(grid, scaled_survival(col, 2.0, grid));
    ok = ok && std::isfinite(slope) && std::abs(slope) <= 0.15;
    detail += (i ? ", " : "") + std::string("w_") + std::to_string(i + 1) + ": hill " +
              std::to_string(h.point) + ", slope " + std::to_string(slope);
  }
  report(6, "bivariate tails estimate the effective index and flatten", ok, detail);
}

// ---------------------------------------------------------------------------
// 7: scalar model: the moment-formula constant and the empirical plateau of
//    x^2 P(W > x) agree within 25% at one million paths.

void criterion_7() {
  ModelSpec spec = load_model_file(model_path("d1_lognormal.model")).resolve();
  PathConfig config;
  config.paths = 1000000;
  std::vector<std::vector<double>> batch = stationary_sample(spec, config);
  std::vector<double> col(batch.size());
  for (std::size_t p = 0; p < batch.size(); ++p) col[p] = batch[p][0];

  Rng aux = make_rng(config.seed, StreamDomain::goldie, 0);
  ConstantEstimate c = goldie_constant(spec, 0, batch, aux);

  std::vector<double> sorted = col;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid =
      log_grid(quantile_of(sorted, 0.99), quantile_of(sorted, 0.9995), 40);
  double flat = plateau(scaled_survival(col, 2.0, grid));

  bool ok = std::abs(flat - c.point) <= 0.25 * c.point;
  report(7, "scalar tail constant matches the survival plateau within 25%", ok,
         "constant " + std::to_string(c.point) + " (se " + std::to_string(c.std_error) +
             "), plateau " + std::to_string(flat));
}

// ---------------------------------------------------------------------------
// 8: the moment sufficiency bound certifies every fleet model at half its
//    smallest index, the Monte Carlo exponent is negative at 3 standard
//    errors, and the scalar case lands on its closed form.

void criterion_8() {
  const char* names[] = {"example34.model",    "bivariate.model", "triangular3.model",
                         "diag2.model",        "d1_lognormal.model", "garch2d.model"};
  bool ok = true;
  std::string detail;
  for (const char* name : names) {
    ModelSpec spec = load_model_file(model_path(name)).resolve();
    TailProfile profile = tail_profile(spec);
    double amin = *std::min_element(profile.alpha.begin(), profile.alpha.end());
    LyapunovSufficiency bound = lyapunov_sufficient(spec, 0.5 * amin);
    LyapunovMcResult mc = lyapunov_mc(spec, 500, 1000, 0x5EED);
    bool model_ok = bound.sufficient && (mc.estimate + 3.0 * mc.std_error < 0.0);
    if (std::string(name) == "d1_lognormal.model")
      model_ok = model_ok && std::abs(mc.estimate - (-1.0)) <= 0.01;
    if (!model_ok) detail += std::string(detail.empty() ? "" : ", ") + name + " failed";
    ok = ok && model_ok;
  }
  if (detail.empty()) detail = "all six models certified, scalar exponent within 0.01";
  report(8, "sufficiency bound and Monte Carlo exponent across the fleet", ok, detail);
}

// ---------------------------------------------------------------------------
// 9: multiplying an exact Pareto(2,1) tail by the constant 2 scales the
//    survival plateau to E X^2 = 4, and the product bound holds on the grid.

void criterion_9() {
  DistributionSpec y_law = pareto(2.0, 1.0);
  Rng rng = make_rng(0x5EED, StreamDomain::breiman, 1);
  std::vector<double> y(1000000);
  for (double& v : y) v = draw(y_law, rng);
  std::vector<double> grid = log_grid(2.5, 12.0, 40);
  bool ok = false;
  std::string detail;
  try {
    BreimanReport rep = breiman_check(constant(2.0), y, 2.0, 1.05, grid);
    ok = std::abs(rep.plateau_value - 4.0) <= 0.05 * 4.0 && rep.holds;
    detail = "plateau " + std::to_string(rep.plateau_value) + " vs bound " +
             std::to_string(rep.bound) + (rep.holds ? " (holds)" : " (violated)");
  } catch (const Error& e) {
    detail = std::string("rejected: ") + e.what();
  }
  report(9, "product tail plateau equals the factor moment within 5%", ok, detail);
}

// ---------------------------------------------------------------------------
// 10: the volatility pipeline: induced recursion validates, each diagonal
//     root matches a 10^7-draw Monte Carlo bisection oracle within 1e-3,
//     and the simulated squared volatility shows the effective index.

double inv_normal_cdf(double p) {
  // Acklam's rational approximation, then one Halley step through erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

/// Root of the empirical moment of a Z^2 + b built from 10^7 stratified
/// draws under a widened normal proposal (importance weights keep the
/// estimate unbiased while the stratification pins the heavy upper tail).
double mc_moment_root(double a, double b, std::uint64_t stream) {
  const long long m = 10000000;
  const double sp = 3.0;  // proposal standard deviation
  std::vector<float> logv(m), logw(m);
  Rng rng = make_rng(0x5EED, StreamDomain::garch, stream);
  for (long long i = 0; i < m; ++i) {
    double u = (static_cast<double>(i) + rng.uniform01()) / static_cast<double>(m);
    double z = sp * inv_normal_cdf(u);
    logv[i] = static_cast<float>(std::log(a * z * z + b));
    logw[i] = static_cast<float>(std::log(sp) - z * z / 2.0 + z * z / (2.0 * sp * sp));
  }
  auto log_mean = [&](double s) {
    long double acc = 0.0;
    for (long long i = 0; i < m; ++i)
      acc += std::exp(s * static_cast<double>(logv[i]) + static_cast<double>(logw[i]));
    return std::log(static_cast<double>(acc / static_cast<long double>(m)));
  };
  double hi = 1.0;
  while (hi < 64.0 && log_mean(hi) < 0.0) hi *= 2.0;
  double lo = hi > 1.0 ? hi / 2.0 : 1e-3;
  for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    (log_mean(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion_10() {
  ModelFile file = load_model_file(model_path("garch2d.model"));
  GarchSpec g = *file.garch;
  ModelSpec spec = to_sre(g);
  ValidationReport val = validate(spec);
  TailProfile profile = tail_profile(spec);

  bool roots_ok = true;
  std::string detail = val.accepted ? "validated" : "validation failed";
  for (int i = 0; i < g.d; ++i) {
    double exact = solve_alpha(garch_entry(g.alpha[i][i], g.beta[i][i]));
    double oracle = mc_moment_root(g.alpha[i][i], g.beta[i][i],
                                   1000 + static_cast<std::uint64_t>(i));
    roots_ok = roots_ok && std::abs(exact - oracle) <= 1e-3;
    detail += ", root " + std::to_string(i + 1) + ": " + std::to_string(exact) + " vs " +
              std::to_string(oracle);
  }

  PathConfig config;
  config.horizon = 200000;
  GarchPath path = simulate_garch(g, config);
  std::vector<double> s2(config.horizon);
  for (long long t = 0; t < config.horizon; ++t) s2[t] = path.s2(t, 0);
  TailEstimate h = hill(s2, default_k(config.horizon));
  double target = profile.tilde_alpha[0];
  bool hill_ok = std::abs(h.point - target) <= 0.25 * target;
  detail += ", hill sigma2_1 " + std::to_string(h.point) + " vs " + std::to_string(target);

  report(10, "volatility pipeline: validation, roots, and tail index",
         val.accepted && roots_ok && hill_ok, detail);
}

}  // namespace

int main() {
  struct Step {
    int num;
    void (*fn)();
  };
  const Step steps[] = {{1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
                        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
                        {9, criterion_9}, {10, criterion_10}};
  for (const Step& s : steps) {
    try {
      s.fn();
    } catch (const std::exception& e) {
      report(s.num, "criterion raised", false, e.what());
    }
  }
  if (failures == 0) {
    std::printf("all 10 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
