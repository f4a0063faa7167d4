#include <benchmark/benchmark.h>

#include <vector>

#include "triax/distribution.hpp"
#include "triax/estimators.hpp"
#include "triax/model.hpp"
#include "triax/rng.hpp"
#include "triax/simulate.hpp"

namespace {

using namespace triax;

ModelSpec bivariate() {
  ModelSpec spec;
  spec.d = 2;
  spec.A = {{lognormal(-0.5, 0.5), constant(1.0)}, {zero_dist(), lognormal(-1.0, 1.0)}};
  spec.B = {constant(1.0), constant(1.0)};
  return spec;
}

void BM_rng_uniform(benchmark::State& state) {
  Rng rng(1, 1);
  double acc = 0.0;
  for (auto _ : state) acc += rng.uniform01();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_rng_uniform);

void BM_rng_normal(benchmark::State& state) {
  Rng rng(1, 2);
  double acc = 0.0;
  for (auto _ : state) acc += rng.normal01();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_rng_normal);

void BM_garch_moment_quadrature(benchmark::State& state) {
  double s = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detail::garch_log_moment_gh(0.1, 0.5, s, 96));
    s = s < 8.0 ? s + 0.25 : 1.0;
  }
}
BENCHMARK(BM_garch_moment_quadrature);

void BM_solve_alpha_lognormal(benchmark::State& state) {
  DistributionSpec dist = lognormal(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_alpha(dist));
}
BENCHMARK(BM_solve_alpha_lognormal);

void BM_stationary_step(benchmark::State& state) {
  ModelSpec spec = bivariate();
  PathConfig config;
  config.paths = 64;
  config.burn_in = static_cast<long long>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stationary_sample(spec, config));
  state.SetItemsProcessed(state.iterations() * config.paths * config.burn_in);
}
BENCHMARK(BM_stationary_step)->Arg(256);

void BM_pi_entry(benchmark::State& state) {
  ModelSpec spec = bivariate();
  Rng rng(7, 3);
  Realization real = draw_realization(spec, 64, rng);
  long long s = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pi_entry(real, 0, 1, s));
    s = s < 60 ? s + 1 : 1;
  }
}
BENCHMARK(BM_pi_entry);

void BM_hill(benchmark::State& state) {
  Rng rng(11, 4);
  std::vector<double> sample(100000);
  DistributionSpec law = pareto(2.0, 1.0);
  for (double& v : sample) v = draw(law, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hill(sample, default_k(100000)));
}
BENCHMARK(BM_hill);

}  // namespace

BENCHMARK_MAIN();
