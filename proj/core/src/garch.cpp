#include "triax/garch.hpp"

#include <cmath>
#include <string>

#include "triax/error.hpp"
#include "triax/rng.hpp"

namespace triax {

void GarchSpec::check() const {
  if (d < 1) throw Error(Errc::invalid_model, "dimension must be at least 1");
  auto dim_ok = [this](const std::vector<std::vector<double>>& m) {
    if (static_cast<int>(m.size()) != d) return false;
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != d) return false;
    return true;
  };
  if (static_cast<int>(alpha0.size()) != d || !dim_ok(alpha) || !dim_ok(beta))
    throw Error(Errc::invalid_model, "parameter arrays do not match the dimension");
  for (int i = 0; i < d; ++i) {
    if (!(alpha0[i] > 0.0))
      throw Error(Errc::invalid_model, "alpha0[" + std::to_string(i + 1) + "] must be positive");
    for (int j = 0; j < d; ++j) {
      if (alpha[i][j] < 0.0 || beta[i][j] < 0.0)
        throw Error(Errc::invalid_model, "negative coefficient at (" + std::to_string(i + 1) +
                                             "," + std::to_string(j + 1) + ")");
      if (j < i && (alpha[i][j] != 0.0 || beta[i][j] != 0.0))
        throw Error(Errc::invalid_model, "below-diagonal coefficient at (" +
                                             std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                             ")");
    }
    if (!(alpha[i][i] + beta[i][i] > 0.0))
      throw Error(Errc::invalid_model,
                  "diagonal " + std::to_string(i + 1) + " has no persistence");
  }
}

ModelSpec to_sre(const GarchSpec& g) {
  g.check();
  ModelSpec spec;
  spec.d = g.d;
  spec.A.assign(g.d, std::vector<DistributionSpec>(g.d, zero_dist()));
  spec.B.resize(g.d);
  for (int i = 0; i < g.d; ++i) {
    for (int j = i; j < g.d; ++j) {
      double a = g.alpha[i][j], b = g.beta[i][j];
      if (a + b <= 0.0) continue;
      spec.A[i][j] = a == 0.0 ? constant(b) : garch_entry(a, b);
    }
    spec.B[i] = constant(g.alpha0[i]);
  }
  spec.check_shape();
  return spec;
}

GarchPath simulate_garch(const GarchSpec& g, const PathConfig& config) {
  g.check();
  config.check();
  int d = g.d;
  GarchPath path;
  path.d = d;
  path.steps = config.horizon;
  path.X.assign(static_cast<std::size_t>(config.horizon) * d, 0.0);
  path.sigma2.assign(static_cast<std::size_t>(config.horizon) * d, 0.0);

  Rng rng = make_rng(config.seed, StreamDomain::garch, 0);
  std::vector<double> w = g.alpha0, wn(d), z(d);
  long long total = config.burn_in + config.horizon;
  for (long long t = 0; t < total; ++t) {
    for (int i = 0; i < d; ++i) z[i] = rng.normal01();
    long long rec = t - config.burn_in;
    if (rec >= 0) {
      for (int i = 0; i < d; ++i) {
        path.sigma2[rec * d + i] = w[i];
        path.X[rec * d + i] = z[i] * std::sqrt(w[i]);
      }
    }
    for (int i = 0; i < d; ++i) {
      double acc = g.alpha0[i];
      for (int j = i; j < d; ++j) {
        double a = g.alpha[i][j], b = g.beta[i][j];
        if (a + b <= 0.0) continue;
        double zz;
        if (g.common_shock) {
          zz = z[j];
        } else {
          zz = a > 0.0 ? rng.normal01() : 0.0;
        }
        acc += (a * zz * zz + b) * w[j];
      }
      wn[i] = acc;
      if (!std::isfinite(acc))
        throw Error(Errc::overflow, "squared volatility " + std::to_string(i + 1) +
                                        " left the floating range at step " + std::to_string(t));
    }
    w.swap(wn);
  }
  return path;
}

}  // namespace triax
