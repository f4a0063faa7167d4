#include "triax/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "triax/error.hpp"
#include "triax/parallel.hpp"

namespace triax {

namespace {

std::string coord(int i) { return std::to_string(i + 1); }

/// Dense d x d product C = L * R restricted to the upper triangle.
void tri_mul(int d, const std::vector<double>& L, const double* R, std::vector<double>& C) {
  C.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int k = i; k < d; ++k) {
      double l = L[i * d + k];
      if (l == 0.0) continue;
      for (int j = k; j < d; ++j) C[i * d + j] += l * R[k * d + j];
    }
  }
}

/// Row update v <- v * A for one stored slot.
void row_step(int d, const double* a, std::vector<double>& v, std::vector<double>& tmp) {
  tmp.assign(d, 0.0);
  for (int m = 0; m < d; ++m) {
    double vm = v[m];
    if (vm == 0.0) continue;
    for (int j = m; j < d; ++j) tmp[j] += vm * a[m * d + j];
  }
  v.swap(tmp);
}

/// One recursion step w <- A w + B reading drawn values from a slot.
void state_step(const ModelSpec& spec, const double* a, const double* b, std::vector<double>& w,
                std::vector<double>& tmp) {
  int d = spec.d;
  tmp.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double acc = b[i];
    for (int j = i; j < d; ++j) {
      if (!spec.A[i][j].is_zero()) acc += a[i * d + j] * w[j];
    }
    tmp[i] = acc;
  }
  w.swap(tmp);
}

}  // namespace

void PathConfig::check() const {
  if (burn_in < 0) throw Error(Errc::parse, "burn_in must be nonnegative");
  if (horizon < 1) throw Error(Errc::parse, "horizon must be at least 1");
  if (truncation < 1) throw Error(Errc::parse, "truncation must be at least 1");
  if (paths < 1) throw Error(Errc::parse, "paths must be at least 1");
}

Realization draw_realization(const ModelSpec& spec, long long T, Rng& rng) {
  if (T < 0) throw Error(Errc::parse, "window length must be nonnegative");
  int d = spec.d;
  Realization real;
  real.d = d;
  real.window = T;
  real.A.assign(static_cast<std::size_t>(T) * d * d, 0.0);
  real.B.assign(static_cast<std::size_t>(T) * d, 0.0);
  for (long long k = 0; k < T; ++k) {
    double* a = real.A.data() + k * d * d;
    double* b = real.B.data() + k * d;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        if (!spec.A[i][j].is_zero()) a[i * d + j] = draw(spec.A[i][j], rng);
      }
    }
    for (int i = 0; i < d; ++i) {
      if (!spec.B[i].is_zero()) b[i] = draw(spec.B[i], rng);
    }
  }
  return real;
}

std::vector<std::vector<double>> iterate(const ModelSpec& spec, const std::vector<double>& w0,
                                         long long steps, Rng& rng) {
  spec.check_shape();
  int d = spec.d;
  if (static_cast<int>(w0.size()) != d)
    throw Error(Errc::parse, "initial state dimension mismatch");
  if (steps < 0) throw Error(Errc::parse, "steps must be nonnegative");
  std::vector<std::vector<double>> out;
  out.reserve(steps);
  std::vector<double> w = w0, tmp;
  std::vector<double> a(static_cast<std::size_t>(d) * d, 0.0), b(d, 0.0);
  for (long long t = 0; t < steps; ++t) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        if (!spec.A[i][j].is_zero()) a[i * d + j] = draw(spec.A[i][j], rng);
    for (int i = 0; i < d; ++i) b[i] = spec.B[i].is_zero() ? 0.0 : draw(spec.B[i], rng);
    state_step(spec, a.data(), b.data(), w, tmp);
    for (int i = 0; i < d; ++i) {
      if (!std::isfinite(w[i]))
        throw Error(Errc::overflow, "component " + coord(i) + " left the floating range at step " +
                                        std::to_string(t + 1));
    }
    out.push_back(w);
  }
  return out;
}

std::vector<std::vector<double>> stationary_sample(const ModelSpec& spec,
                                                   const PathConfig& config) {
  spec.check_shape();
  config.check();
  int d = spec.d;
  long long n = config.paths;
  std::vector<std::vector<double>> out(n);
  int workers = resolve_workers(config.workers);
  std::string fail;
  std::mutex fail_mu;
  parallel_for(n, workers, [&](long long lo, long long hi) {
    std::vector<double> w, tmp, a(static_cast<std::size_t>(d) * d, 0.0), b(d, 0.0);
    for (long long p = lo; p < hi; ++p) {
      Rng rng = make_rng(config.seed, StreamDomain::stationary, static_cast<std::uint64_t>(p));
      w.assign(d, 0.0);
      for (long long t = 0; t < config.burn_in; ++t) {
        for (int i = 0; i < d; ++i)
          for (int j = i; j < d; ++j)
            if (!spec.A[i][j].is_zero()) a[i * d + j] = draw(spec.A[i][j], rng);
        for (int i = 0; i < d; ++i) b[i] = spec.B[i].is_zero() ? 0.0 : draw(spec.B[i], rng);
        state_step(spec, a.data(), b.data(), w, tmp);
      }
      for (int i = 0; i < d; ++i) {
        if (!std::isfinite(w[i])) {
          std::lock_guard<std::mutex> g(fail_mu);
          if (fail.empty())
            fail = "component " + coord(i) + " left the floating range on path " +
                   std::to_string(p);
        }
      }
      out[p] = w;
    }
  });
  if (!fail.empty()) throw Error(Errc::overflow, fail);
  return out;
}

double pi_entry(const Realization& real, int i, int j, long long s) {
  int d = real.d;
  if (i < 0 || i >= d || j < 0 || j >= d) throw Error(Errc::parse, "coordinate out of range");
  if (s < 0 || s > real.window) throw Error(Errc::parse, "product length exceeds stored window");
  if (s == 0) return i == j ? 1.0 : 0.0;
  std::vector<double> v(d, 0.0), tmp;
  v[i] = 1.0;
  int e2 = 0;
  for (long long k = 0; k < s; ++k) {
    row_step(d, real.A.data() + k * d * d, v, tmp);
    double big = 0.0;
    for (int m = i; m < d; ++m) big = std::max(big, v[m]);
    if (big > 0.0 && (big > 1e300 || big < 1e-300)) {
      int ex = 0;
      std::frexp(big, &ex);
      for (int m = i; m < d; ++m) v[m] = std::ldexp(v[m], -ex);
      e2 += ex;
    }
  }
  return std::ldexp(v[j], e2);
}

double pi_entry_enum(const Realization& real, int i, int j, long long s,
                     bool first_step_off_diagonal) {
  int d = real.d;
  if (i < 0 || i >= d || j < 0 || j >= d) throw Error(Errc::parse, "coordinate out of range");
  if (s < 0 || s > real.window) throw Error(Errc::parse, "product length exceeds stored window");
  if (d > 8 || s > 12)
    throw Error(Errc::too_large, "sequence enumeration is limited to d <= 8 and s <= 12");
  if (s == 0) return i == j ? 1.0 : 0.0;
  double total = 0.0;
  // Depth-first walk over non-decreasing index sequences i = h(0), ..., h(s) = j,
  // multiplying the matching entry of each stored factor.
  std::vector<int> h(s + 1, i);
  std::vector<double> prod(s + 1, 1.0);
  long long p = 0;
  std::vector<int> next(s + 1, 0);
  next[0] = first_step_off_diagonal ? i + 1 : i;
  while (p >= 0) {
    if (p == s) {
      if (h[p] == j) total += prod[p];
      --p;
      continue;
    }
    int c = h[p];
    bool advanced = false;
    for (int cand = std::max(next[p], c); cand <= j; ++cand) {
      double a = real.a(p, c, cand);
      if (a == 0.0) continue;
      next[p] = cand + 1;
      h[p + 1] = cand;
      prod[p + 1] = prod[p] * a;
      ++p;
      next[p] = (p == 0 && first_step_off_diagonal) ? h[p] + 1 : h[p];
      advanced = true;
      break;
    }
    if (!advanced) {
      --p;
      continue;
    }
  }
  return total;
}

std::vector<DecompositionTrace> decompose(const ModelSpec& spec, int ell, long long s,
                                          const PathConfig& config, long long split_s1) {
  spec.check_shape();
  config.check();
  int d = spec.d;
  if (ell < 0 || ell >= d) throw Error(Errc::parse, "coordinate out of range");
  if (s < 1) throw Error(Errc::parse, "horizon must be at least 1");
  TailProfile profile = tail_profile(spec);
  DepGraph graph = build_depgraph(spec);
  int j0 = profile.j0[ell];
  if (j0 == ell)
    throw Error(Errc::not_dominated,
                "coordinate " + coord(ell) + " carries its own tail; nothing to decompose");
  double at = profile.tilde_alpha[ell];

  // Window length: long enough that the leading diagonal factor's
  // effective-index moment decays below 1e-12, so the zero start is inert.
  double r = 0.0;
  for (int i = 0; i < d; ++i) {
    if (i == j0 || !graph.reaches(ell, i)) continue;
    r = std::max(r, moment(spec.A[i][i], at));
  }
  long long t_min = config.burn_in;
  if (r > 0.0 && r < 1.0) {
    t_min = static_cast<long long>(std::ceil(std::log(1e-12) / std::log(r)));
    t_min = std::min(t_min, static_cast<long long>(20000));
  }
  long long burn = std::max(config.burn_in, t_min);
  long long T = burn + s;

  long long s1 = split_s1 > 0 ? split_s1 : s - s / 2;
  if (s1 > s) throw Error(Errc::parse, "split exceeds horizon");

  std::vector<DecompositionTrace> traces(config.paths);
  int workers = resolve_workers(config.workers);
  parallel_for(config.paths, workers, [&](long long lo, long long hi) {
    std::vector<double> w, tmp, Pi1, Pi2, Pif, scratch, row;
    std::vector<std::vector<double>> st(s + 1);
    std::vector<double> dp(s + 1, 1.0);
    for (long long p = lo; p < hi; ++p) {
      Rng rng = make_rng(config.seed, StreamDomain::decompose, static_cast<std::uint64_t>(p));
      Realization real = draw_realization(spec, T, rng);

      w.assign(d, 0.0);
      for (long long k = T - 1; k >= 0; --k) {
        state_step(spec, real.A.data() + k * d * d, real.B.data() + k * d, w, tmp);
        if (k <= s) st[k] = w;
      }

      Pi1.assign(static_cast<std::size_t>(d) * d, 0.0);
      for (int i = 0; i < d; ++i) Pi1[i * d + i] = 1.0;
      for (long long k = 0; k < s1; ++k) {
        tri_mul(d, Pi1, real.A.data() + k * d * d, scratch);
        Pi1.swap(scratch);
      }
      Pi2.assign(static_cast<std::size_t>(d) * d, 0.0);
      for (int i = 0; i < d; ++i) Pi2[i * d + i] = 1.0;
      for (long long k = s1; k < s; ++k) {
        tri_mul(d, Pi2, real.A.data() + k * d * d, scratch);
        Pi2.swap(scratch);
      }
      tri_mul(d, Pi1, Pi2.data(), Pif);

      for (long long n = 0; n < s; ++n) dp[n + 1] = dp[n] * real.a(n, ell, ell);

      long double qf = 0.0;
      for (long long n = 0; n < s; ++n) {
        long double dterm = real.b(n, ell);
        for (int j = ell + 1; j < d; ++j) {
          if (!spec.A[ell][j].is_zero())
            dterm += static_cast<long double>(real.a(n, ell, j)) * st[n + 1][j];
        }
        qf += static_cast<long double>(dp[n]) * dterm;
      }

      auto q_b = [&](long long h) -> double {
        long double acc = 0.0;
        for (long long n = 0; n < h; ++n) {
          long double bracket = real.b(n, ell);
          row.assign(d, 0.0);
          for (int j = ell + 1; j < d; ++j) row[j] = real.a(n, ell, j);
          for (long long m = 1; m <= h - 1 - n; ++m) {
            long double inner = 0.0;
            for (int j = ell + 1; j < d; ++j) inner += static_cast<long double>(row[j]) * real.b(n + m, j);
            bracket += inner;
            if (m < h - 1 - n) row_step(d, real.A.data() + (n + m) * d * d, row, tmp);
          }
          acc += static_cast<long double>(dp[n]) * bracket;
        }
        return static_cast<double>(acc);
      };

      long double qpw = 0.0, qppw = 0.0, qpw1 = 0.0, qppw1 = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j == ell || !graph.reaches(ell, j)) continue;
        long double full = static_cast<long double>(Pif[ell * d + j]) * st[s][j];
        long double half = static_cast<long double>(Pi1[ell * d + j]) * st[s1][j];
        if (graph.reaches(j, j0)) {
          qpw += full;
          qpw1 += half;
        } else {
          qppw += full;
          qppw1 += half;
        }
      }

      DecompositionTrace& tr = traces[p];
      tr.ell = ell;
      tr.j0 = j0;
      tr.s = s;
      tr.s1 = s1;
      tr.s2 = s - s1;
      tr.truncation_level = T;
      tr.Q_F = static_cast<double>(qf);
      tr.Q_T = dp[s] * st[s][ell];
      tr.QpW = static_cast<double>(qpw);
      tr.QppW = static_cast<double>(qppw);
      tr.Q_W = static_cast<double>(qpw + qppw);
      tr.Q_B = q_b(s);
      tr.pi_lj0 = Pif[ell * d + j0];
      tr.W_j0_ms = st[s][j0];
      tr.W_l_0 = st[0][ell];
      double anchor = tr.pi_lj0 * tr.W_j0_ms;
      tr.QstarW = static_cast<double>(qpw1) - anchor;
      tr.R = tr.W_l_0 - anchor;
      tr.QppW_s1 = static_cast<double>(qppw1);
      tr.Q_B_s1 = q_b(s1);
      tr.Q_T_s1 = dp[s1] * st[s1][ell];
      tr.R_alt = tr.QppW_s1 + tr.QstarW + tr.Q_B_s1 + tr.Q_T_s1;
    }
  });
  return traces;
}

USequence u_sequence(const ModelSpec& spec, int ell, long long s_max, const PathConfig& config) {
  spec.check_shape();
  config.check();
  int d = spec.d;
  if (ell < 0 || ell >= d) throw Error(Errc::parse, "coordinate out of range");
  if (s_max < 2) throw Error(Errc::parse, "s_max must be at least 2");
  TailProfile profile = tail_profile(spec);
  DepGraph graph = build_depgraph(spec);
  int j0 = profile.j0[ell];
  if (j0 == ell)
    throw Error(Errc::not_dominated,
                "coordinate " + coord(ell) + " carries its own tail; no propagation factor");
  double alpha = profile.alpha[j0];

  std::vector<int> mids;
  for (int j = 0; j < d; ++j) {
    if (j == ell || j == j0) continue;
    if (graph.reaches(ell, j) && graph.reaches(j, j0)) mids.push_back(j);
  }

  // Lane layout per s (0-based s-1): contribution sum, contribution square
  // sum, then one raw-moment sum per intermediate coordinate. A final lane
  // counts path-wise monotonicity violations.
  int per_s = 2 + static_cast<int>(mids.size());
  int lanes = static_cast<int>(s_max) * per_s + 1;
  int workers = resolve_workers(config.workers);
  long long n = config.paths;

  std::vector<double> totals = blocked_accumulate(
      n, workers, lanes,
      [&](long long lo, long long hi, double* part) {
        std::vector<double> v(d), tmp, diag(s_max), pi(s_max);
        std::vector<double> mid_pi(mids.size() * s_max);
        for (long long p = lo; p < hi; ++p) {
          Rng rng = make_rng(config.seed, StreamDomain::u_sequence, static_cast<std::uint64_t>(p));
          Realization real = draw_realization(spec, s_max, rng);
          std::fill(v.begin(), v.end(), 0.0);
          v[ell] = 1.0;
          double violations = 0.0;
          for (long long k = 0; k < s_max; ++k) {
            diag[k] = real.a(k, j0, j0);
            double floor_next = v[j0] * diag[k];
            row_step(d, real.A.data() + k * d * d, v, tmp);
            if (v[j0] < floor_next * (1.0 - 1e-12)) violations += 1.0;
            pi[k] = v[j0];
            for (std::size_t q = 0; q < mids.size(); ++q) mid_pi[q * s_max + k] = v[mids[q]];
          }
          double c = 1.0;
          for (long long k = s_max - 1; k >= 0; --k) {
            double contrib = std::pow(pi[k] * c, alpha);
            double* lane = part + k * per_s;
            lane[0] += contrib;
            lane[1] += contrib * contrib;
            for (std::size_t q = 0; q < mids.size(); ++q)
              lane[2 + q] += std::pow(mid_pi[q * s_max + k], alpha);
            c *= diag[k];
          }
          part[lanes - 1] += violations;
        }
      });

  USequence out;
  out.ell = ell;
  out.j0 = j0;
  out.alpha_j0 = alpha;
  out.s.resize(s_max);
  out.estimate.resize(s_max);
  out.std_error.resize(s_max);
  double dn = static_cast<double>(n);
  for (long long k = 0; k < s_max; ++k) {
    double sum = totals[k * per_s];
    double sumsq = totals[k * per_s + 1];
    double mean = sum / dn;
    out.s[k] = k + 1;
    out.estimate[k] = mean;
    double var = std::max(0.0, sumsq - dn * mean * mean);
    out.std_error[k] = n > 1 ? std::sqrt(var / (dn * (dn - 1.0))) : 0.0;
  }
  out.pathwise_monotone = totals[lanes - 1] == 0.0;

  double u_final = out.estimate.back();
  long long tail_start = static_cast<long long>(std::ceil(0.8 * static_cast<double>(s_max)));
  tail_start = std::max<long long>(1, std::min(tail_start, s_max - 1));
  if (u_final > 0.0) {
    double change = (u_final - out.estimate[tail_start - 1]) / u_final;
    out.converged = change < 0.01;
  }
  for (std::size_t q = 0; q < mids.size(); ++q) {
    long long first = -1;
    for (long long k = 0; k < s_max; ++k) {
      double mean = totals[k * per_s + 2 + q] / dn;
      if (mean < u_final) {
        first = k + 1;
        break;
      }
    }
    out.first_s_below_u.emplace_back(mids[q], first);
  }
  return out;
}

}  // namespace triax
