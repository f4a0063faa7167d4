#include "triax/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "triax/error.hpp"
#include "triax/parallel.hpp"

namespace triax {

namespace {

std::string coord(int i) { return std::to_string(i + 1); }

/// Top k+1 order statistics in descending order.
std::vector<double> top_order(std::vector<double>& sample, long long k) {
  long long n = static_cast<long long>(sample.size());
  if (k < 1 || k >= n) throw Error(Errc::parse, "k must satisfy 0 < k < n");
  std::partial_sort(sample.begin(), sample.begin() + k + 1, sample.end(), std::greater<>());
  return std::vector<double>(sample.begin(), sample.begin() + k + 1);
}

double survival_at(const std::vector<double>& sorted_asc, double x) {
  auto it = std::upper_bound(sorted_asc.begin(), sorted_asc.end(), x);
  return static_cast<double>(sorted_asc.end() - it) / static_cast<double>(sorted_asc.size());
}

}  // namespace

long long default_k(long long n) {
  return static_cast<long long>(std::floor(std::pow(static_cast<double>(n), 2.0 / 3.0)));
}

TailEstimate hill(std::vector<double> sample, long long k) {
  long long n = static_cast<long long>(sample.size());
  std::vector<double> top = top_order(sample, k);
  double floor_stat = top[k];
  if (!(floor_stat > 0.0))
    throw Error(Errc::degenerate, "needs k+1 strictly positive upper order statistics");
  double acc = 0.0, comp = 0.0;
  for (long long i = 0; i < k; ++i) {
    double y = std::log(top[i] / floor_stat) - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  double mean = acc / static_cast<double>(k);
  if (!(mean > 0.0)) throw Error(Errc::degenerate, "top order statistics are all equal");
  TailEstimate est;
  est.method = "hill";
  est.point = 1.0 / mean;
  est.std_error = est.point / std::sqrt(static_cast<double>(k));
  est.k = k;
  est.n = n;
  return est;
}

TailEstimate rank_regression(std::vector<double> sample, long long k) {
  long long n = static_cast<long long>(sample.size());
  std::vector<double> top = top_order(sample, k);
  if (k < 3) throw Error(Errc::degenerate, "needs at least 3 points for a regression slope");
  if (!(top[k - 1] > 0.0))
    throw Error(Errc::degenerate, "needs k strictly positive upper order statistics");
  std::vector<double> xs(k), ys(k);
  for (long long i = 0; i < k; ++i) {
    xs[i] = std::log(top[i]);
    ys[i] = std::log(static_cast<double>(i + 1) / static_cast<double>(n));
  }
  double xbar = 0.0, ybar = 0.0;
  for (long long i = 0; i < k; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(k);
  ybar /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (long long i = 0; i < k; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx == 0.0) throw Error(Errc::degenerate, "top order statistics are all equal");
  double slope = sxy / sxx;
  if (!(slope < 0.0)) throw Error(Errc::degenerate, "survival slope is not negative");
  double rss = 0.0;
  for (long long i = 0; i < k; ++i) {
    double r = ys[i] - ybar - slope * (xs[i] - xbar);
    rss += r * r;
  }
  TailEstimate est;
  est.method = "rank_regression";
  est.point = -slope;
  est.std_error = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
  est.k = k;
  est.n = n;
  return est;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw Error(Errc::parse, "grid needs 0 < lo < hi, n >= 2");
  std::vector<double> g(n);
  double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

std::vector<double> scaled_survival(const std::vector<double>& sample, double alpha,
                                    const std::vector<double>& grid) {
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> curve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    curve[i] = std::pow(grid[i], alpha) * survival_at(sorted, grid[i]);
  return curve;
}

double plateau(const std::vector<double>& curve) {
  if (curve.empty()) throw Error(Errc::parse, "empty curve");
  double best = 0.0;
  for (std::size_t i = curve.size() / 2; i < curve.size(); ++i) best = std::max(best, curve[i]);
  return best;
}

double last_decade_slope(const std::vector<double>& grid, const std::vector<double>& curve) {
  double cutoff = grid.back() / 10.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= cutoff && curve[i] > 0.0) {
      xs.push_back(std::log(grid[i]));
      ys.push_back(std::log(curve[i]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(xs.size());
  ybar /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

ConstantEstimate goldie_constant(const ModelSpec& spec, int k,
                                 const std::vector<std::vector<double>>& w_sample,
                                 Rng& aux_stream) {
  spec.check_shape();
  int d = spec.d;
  if (k < 0 || k >= d) throw Error(Errc::parse, "coordinate out of range");
  if (w_sample.empty()) throw Error(Errc::parse, "empty stationary sample");
  TailProfile profile = tail_profile(spec);
  if (profile.j0[k] != k)
    throw Error(Errc::wrong_regime,
                "coordinate " + coord(k) + " inherits its tail from coordinate " +
                    coord(profile.j0[k]) + "; the direct formula does not apply");
  double alpha = profile.alpha[k];
  double lambda = log_moment(spec.A[k][k], alpha);
  if (!(lambda > 0.0))
    throw Error(Errc::wrong_regime, "nonpositive slope of the diagonal moment at its root");

  long long n = static_cast<long long>(w_sample.size());
  std::vector<double> contrib(n);
  for (long long p = 0; p < n; ++p) {
    const std::vector<double>& w = w_sample[p];
    double a = draw(spec.A[k][k], aux_stream);
    double dterm = 0.0;
    for (int j = k + 1; j < d; ++j) {
      if (!spec.A[k][j].is_zero()) dterm += draw(spec.A[k][j], aux_stream) * w[j];
    }
    if (!spec.B[k].is_zero()) dterm += draw(spec.B[k], aux_stream);
    double base = a * w[k];
    contrib[p] = std::pow(base + dterm, alpha) - std::pow(base, alpha);
  }

  double denom = alpha * lambda;
  double total = kahan_sum(contrib);
  ConstantEstimate est;
  est.point = total / static_cast<double>(n) / denom;

  long long blocks = std::min<long long>(20, n);
  std::vector<double> loo(blocks);
  long long chunk = (n + blocks - 1) / blocks;
  double loo_mean = 0.0;
  for (long long b = 0; b < blocks; ++b) {
    long long lo = b * chunk, hi = std::min(n, lo + chunk);
    double block_sum = 0.0, comp = 0.0;
    for (long long p = lo; p < hi; ++p) {
      double y = contrib[p] - comp;
      double t = block_sum + y;
      comp = (t - block_sum) - y;
      block_sum = t;
    }
    loo[b] = (total - block_sum) / static_cast<double>(n - (hi - lo)) / denom;
    loo_mean += loo[b];
  }
  loo_mean /= static_cast<double>(blocks);
  double ss = 0.0;
  for (long long b = 0; b < blocks; ++b) ss += (loo[b] - loo_mean) * (loo[b] - loo_mean);
  est.std_error =
      std::sqrt(ss * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
  return est;
}

ConstantsReport constants_recursive(const TailProfile& profile, const DepGraph& graph,
                                    const std::map<int, ConstantEstimate>& goldie,
                                    const std::map<int, double>& u_values) {
  (void)graph;  // the dominance map already encodes the reachability answer
  int d = static_cast<int>(profile.alpha.size());
  std::vector<double> value(d, 0.0), error(d, 0.0);
  ConstantsReport rep;
  rep.coordinate.resize(d);
  rep.constant.resize(d);
  rep.std_error.resize(d);
  rep.method.resize(d);
  rep.u_used.assign(d, std::numeric_limits<double>::quiet_NaN());
  rep.chain.resize(d);
  for (int k = d - 1; k >= 0; --k) {
    rep.coordinate[k] = k;
    int j0 = profile.j0[k];
    if (j0 == k) {
      auto it = goldie.find(k);
      if (it == goldie.end())
        throw Error(Errc::missing_u, "no direct constant supplied for coordinate " + coord(k));
      value[k] = it->second.point;
      error[k] = it->second.std_error;
      rep.method[k] = "goldie-direct";
      rep.chain[k] = "C_" + coord(k) + " direct";
    } else {
      auto it = u_values.find(k);
      if (it == u_values.end())
        throw Error(Errc::missing_u,
                    "no propagation factor supplied for coordinate " + coord(k));
      value[k] = it->second * value[j0];
      error[k] = it->second * error[j0];
      rep.method[k] = "recursive u*C";
      rep.u_used[k] = it->second;
      rep.chain[k] = "C_" + coord(k) + " = u_" + coord(k) + " * C_" + coord(j0);
    }
    rep.constant[k] = value[k];
    rep.std_error[k] = error[k];
  }
  return rep;
}

BreimanReport breiman_check(const DistributionSpec& x_dist, const std::vector<double>& y_sample,
                            double alpha, double M, const std::vector<double>& grid,
                            std::uint64_t seed) {
  if (y_sample.empty()) throw Error(Errc::parse, "empty sample");
  if (!(alpha > 0.0) || !(M > 0.0)) throw Error(Errc::parse, "alpha and M must be positive");
  double higher = moment(x_dist, alpha * 1.01 + 1e-3);
  if (!std::isfinite(higher))
    throw Error(Errc::hypothesis_fail, "factor law lacks a moment beyond alpha");

  BreimanReport rep;
  rep.alpha = alpha;
  rep.M = M;
  rep.x_moment = moment(x_dist, alpha);
  rep.bound = M * rep.x_moment;
  rep.grid = grid;

  std::vector<double> sorted_y = y_sample;
  std::sort(sorted_y.begin(), sorted_y.end());
  rep.y_sup = 0.0;
  for (double x : grid)
    rep.y_sup = std::max(rep.y_sup, std::pow(x, alpha) * survival_at(sorted_y, x));
  if (rep.y_sup > M)
    throw Error(Errc::hypothesis_fail, "scaled survival of the heavy factor exceeds its bound");

  Rng rng = make_rng(seed, StreamDomain::breiman, 0);
  std::vector<double> products(y_sample.size());
  for (std::size_t i = 0; i < y_sample.size(); ++i) products[i] = y_sample[i] * draw(x_dist, rng);
  std::sort(products.begin(), products.end());
  rep.curve.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    rep.curve[i] = std::pow(grid[i], alpha) * survival_at(products, grid[i]);
  rep.plateau_value = plateau(rep.curve);
  rep.holds = rep.plateau_value <= rep.bound;
  return rep;
}

}  // namespace triax
