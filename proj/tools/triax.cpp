#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triax/error.hpp"
#include "triax/estimators.hpp"
#include "triax/format.hpp"
#include "triax/garch.hpp"
#include "triax/model.hpp"
#include "triax/model_io.hpp"
#include "triax/parallel.hpp"
#include "triax/simulate.hpp"

namespace {

using namespace triax;

struct Options {
  std::string model;
  std::uint64_t seed = 0x5EED;
  long long paths = 1000;
  long long burnin = 300;
  long long s = 0;  // 0: per-subcommand default
  long long truncation = 512;
  long long k = 0;
  double eps = 0.0;
  int workers = 0;
  int coord = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Options& opt, bool with_coord = false) {
  cmd->add_option("--model", opt.model, "model file path")->required();
  cmd->add_option("--seed", opt.seed, "base seed (default 0x5EED)");
  cmd->add_option("--paths", opt.paths, "number of Monte Carlo paths");
  cmd->add_option("--burnin", opt.burnin, "warm-up steps before recording");
  cmd->add_option("--s", opt.s, "horizon / step count");
  cmd->add_option("--truncation", opt.truncation, "stored realization window length");
  cmd->add_option("--k", opt.k, "order-statistics count (0: floor(n^(2/3)))");
  cmd->add_option("--eps", opt.eps, "moment exponent (0: half the smallest index)");
  cmd->add_option("--workers", opt.workers, "worker threads (0: TRIAX_WORKERS or hardware)");
  cmd->add_option("--out", opt.out, "output path (default stdout)");
  if (with_coord) cmd->add_option("--coord", opt.coord, "coordinate, 1-based");
}

PathConfig to_config(const Options& opt) {
  PathConfig cfg;
  cfg.burn_in = opt.burnin;
  cfg.horizon = opt.s > 0 ? opt.s : 10;
  cfg.truncation = opt.truncation;
  cfg.seed = opt.seed;
  cfg.paths = opt.paths;
  cfg.workers = opt.workers;
  return cfg;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    write_file(out, content);
}

std::string out_stem(const std::string& out) {
  std::size_t slash = out.find_last_of('/');
  std::size_t dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out;
  return out.substr(0, dot);
}

int check_coord(int coord, int d) {
  if (coord < 1 || coord > d)
    throw Error(Errc::parse, "--coord must be in [1, " + std::to_string(d) + "]");
  return coord - 1;
}

std::vector<double> column(const std::vector<std::vector<double>>& batch, int i) {
  std::vector<double> col(batch.size());
  for (std::size_t p = 0; p < batch.size(); ++p) col[p] = batch[p][i];
  return col;
}

double quantile(std::vector<double> sorted, double p) {
  std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1));
  return sorted[idx];
}

int run_validate(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  ValidationReport report = validate(file.resolve());
  emit(opt.out, validation_to_json(report));
  if (!report.accepted) {
    std::cerr << "validation failed:";
    for (const ConditionCheck& c : report.conditions)
      if (c.checked && !c.pass) std::cerr << " " << c.id;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

int run_indices(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  emit(opt.out, profile_to_json(tail_profile(file.resolve())));
  return 0;
}

int run_simulate(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  emit(opt.out, batch_to_csv(stationary_sample(file.resolve(), to_config(opt))));
  return 0;
}

int run_estimate(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  const ModelSpec& spec = file.resolve();
  TailProfile profile = tail_profile(spec);
  std::vector<std::vector<double>> batch = stationary_sample(spec, to_config(opt));
  long long n = static_cast<long long>(batch.size());
  long long k = opt.k > 0 ? opt.k : default_k(n);

  std::vector<TailEstimate> estimates;
  std::vector<int> coords;
  for (int i = 0; i < spec.d; ++i) {
    std::vector<double> col = column(batch, i);
    estimates.push_back(hill(col, k));
    coords.push_back(i);
    estimates.push_back(rank_regression(col, k));
    coords.push_back(i);
    if (!opt.out.empty()) {
      std::vector<double> sorted = col;
      std::sort(sorted.begin(), sorted.end());
      double lo = quantile(sorted, 0.95), hi = quantile(sorted, 0.9995);
      if (lo > 0.0 && hi > lo * 1.0001) {
        std::vector<double> grid = log_grid(lo, hi, 40);
        std::vector<double> curve = scaled_survival(col, profile.tilde_alpha[i], grid);
        write_file(out_stem(opt.out) + "_survival_" + std::to_string(i + 1) + ".csv",
                   survival_to_csv(grid, curve));
      }
    }
  }
  emit(opt.out, estimates_to_json(estimates, coords, opt.seed));
  return 0;
}

int run_decompose(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  const ModelSpec& spec = file.resolve();
  int ell = check_coord(opt.coord, spec.d);
  long long s = opt.s > 0 ? opt.s : 8;
  std::vector<DecompositionTrace> traces = decompose(spec, ell, s, to_config(opt));
  emit(opt.out, traces_to_csv(traces));
  TailProfile profile = tail_profile(spec);
  double a = profile.tilde_alpha[ell];
  double acc = 0.0;
  for (const DecompositionTrace& t : traces) acc += std::pow(std::fabs(t.R), a);
  std::cerr << "mean |R|^" << fmt_double(a) << " over " << traces.size() << " paths at s=" << s
            << ": " << fmt_double(acc / static_cast<double>(traces.size())) << "\n";
  return 0;
}

int run_useq(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  const ModelSpec& spec = file.resolve();
  int ell = check_coord(opt.coord, spec.d);
  long long s_max = opt.s > 0 ? opt.s : 30;
  USequence u = u_sequence(spec, ell, s_max, to_config(opt));
  emit(opt.out, useq_to_csv(u));
  std::cerr << "u = " << fmt_double(u.u()) << " (std error " << fmt_double(u.std_error.back())
            << "), converged = " << (u.converged ? "true" : "false")
            << ", pathwise_monotone = " << (u.pathwise_monotone ? "true" : "false") << "\n";
  for (const auto& [j, first] : u.first_s_below_u) {
    std::cerr << "coordinate " << (j + 1) << ": first s with raw moment below final u = ";
    if (first < 0)
      std::cerr << "not reached\n";
    else
      std::cerr << first << "\n";
  }
  return 0;
}

int run_constants(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  const ModelSpec& spec = file.resolve();
  TailProfile profile = tail_profile(spec);
  DepGraph graph = build_depgraph(spec);
  std::vector<std::vector<double>> w = stationary_sample(spec, to_config(opt));

  std::map<int, ConstantEstimate> goldie;
  std::map<int, double> u_values;
  long long s_max = opt.s > 0 ? opt.s : 30;
  for (int kk = 0; kk < spec.d; ++kk) {
    if (profile.self_dominant(kk)) {
      Rng aux = make_rng(opt.seed, StreamDomain::goldie, static_cast<std::uint64_t>(kk));
      goldie[kk] = goldie_constant(spec, kk, w, aux);
    } else {
      u_values[kk] = u_sequence(spec, kk, s_max, to_config(opt)).u();
    }
  }
  emit(opt.out, constants_to_json(constants_recursive(profile, graph, goldie, u_values),
                                  opt.seed));
  return 0;
}

int run_lyapunov(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  const ModelSpec& spec = file.resolve();
  double eps = opt.eps;
  if (eps <= 0.0) {
    TailProfile profile = tail_profile(spec);
    double amin = profile.alpha[0];
    for (double a : profile.alpha) amin = std::min(amin, a);
    eps = 0.5 * amin;
  }
  LyapunovSufficiency bound = lyapunov_sufficient(spec, eps);
  LyapunovMcResult mc = lyapunov_mc(spec, opt.s > 0 ? opt.s : 500, opt.paths, opt.seed,
                                    opt.workers);
  emit(opt.out, lyapunov_to_json(eps, bound, mc));
  return 0;
}

int run_garch(const Options& opt) {
  ModelFile file = load_model_file(opt.model);
  if (!file.garch) throw Error(Errc::parse, "model file has no garch section");
  GarchSpec g = *file.garch;
  ValidationReport report = validate(to_sre(g));
  if (!report.accepted) {
    std::cerr << "induced recursion failed validation\n";
    return 1;
  }
  PathConfig cfg = to_config(opt);
  cfg.horizon = opt.s > 0 ? opt.s : 10000;
  GarchPath path = simulate_garch(g, cfg);
  emit(opt.out, garch_to_csv(path));
  if (opt.k > 0) {
    std::vector<TailEstimate> estimates;
    std::vector<int> coords;
    for (int i = 0; i < g.d; ++i) {
      std::vector<double> col(path.steps);
      for (long long t = 0; t < path.steps; ++t) col[t] = path.s2(t, i);
      estimates.push_back(hill(col, opt.k));
      coords.push_back(i);
    }
    std::cerr << estimates_to_json(estimates, coords, opt.seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail analysis for upper-triangular stochastic recurrences"};
  app.require_subcommand(1);

  Options opt;
  std::map<std::string, int (*)(const Options&)> runners;

  add_common(app.add_subcommand("validate", "check model conditions, emit a JSON report"), opt);
  runners["validate"] = run_validate;
  add_common(app.add_subcommand("indices", "tail indices and dominant coordinates"), opt);
  runners["indices"] = run_indices;
  add_common(app.add_subcommand("simulate", "stationary sample batch as CSV"), opt);
  runners["simulate"] = run_simulate;
  add_common(app.add_subcommand("estimate", "Hill / rank estimates plus survival curves"), opt);
  runners["estimate"] = run_estimate;
  add_common(app.add_subcommand("decompose", "path-wise decomposition traces as CSV"), opt, true);
  runners["decompose"] = run_decompose;
  add_common(app.add_subcommand("useq", "propagation factor sequence as CSV"), opt, true);
  runners["useq"] = run_useq;
  add_common(app.add_subcommand("constants", "tail constants via direct and recursive routes"),
             opt);
  runners["constants"] = run_constants;
  add_common(app.add_subcommand("lyapunov", "sufficiency bound and Monte Carlo exponent"), opt);
  runners["lyapunov"] = run_lyapunov;
  add_common(app.add_subcommand("garch", "simulate returns, optionally chain Hill on sigma^2"),
             opt);
  runners["garch"] = run_garch;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return runners[app.get_subcommands().front()->get_name()](opt);
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.is_input_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
