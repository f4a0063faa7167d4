#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace triax {

/// Worker count resolution: explicit request > TRIAX_WORKERS env > hardware.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TRIAX_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

/// Splits [0, n) into contiguous blocks, one per worker. Each item must be
/// driven by its own RNG stream, so the partition cannot affect results; it
/// only affects wall time.
inline void parallel_for(long long n, int workers, const std::function<void(long long, long long)>& body) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2 * workers) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long long lo = w * chunk;
    long long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

/// Compensated (Kahan) sum over a value-per-item buffer. Reduction order is
/// fixed by item index, independent of the worker partition.
inline double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// Deterministic blocked reduction for large batches where a per-item buffer
/// would be wasteful. Items are grouped into fixed-size blocks (independent
/// of the worker count); body(lo, hi, part) accumulates lane values for items
/// [lo, hi) into part[0..lanes) in item order; block partials are then merged
/// lane-wise in block order with compensated addition.
inline std::vector<double> blocked_accumulate(
    long long n, int workers, int lanes,
    const std::function<void(long long, long long, double*)>& body, long long block = 4096) {
  long long n_blocks = (n + block - 1) / block;
  if (n_blocks < 1) n_blocks = 1;
  std::vector<double> parts(static_cast<std::size_t>(n_blocks) * lanes, 0.0);
  parallel_for(n_blocks, workers, [&](long long blo, long long bhi) {
    for (long long b = blo; b < bhi; ++b) {
      long long lo = b * block;
      long long hi = std::min(n, lo + block);
      if (lo < hi) body(lo, hi, parts.data() + b * lanes);
    }
  });
  std::vector<double> total(lanes, 0.0), comp(lanes, 0.0);
  for (long long b = 0; b < n_blocks; ++b) {
    for (int l = 0; l < lanes; ++l) {
      double y = parts[b * lanes + l] - comp[l];
      double t = total[l] + y;
      comp[l] = (t - total[l]) - y;
      total[l] = t;
    }
  }
  return total;
}

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of a per-item buffer with compensated sums.
inline MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  if (values.empty()) return r;
  double n = static_cast<double>(values.size());
  r.mean = kahan_sum(values) / n;
  double ss = 0.0, c = 0.0;
  for (double v : values) {
    double d = v - r.mean;
    double y = d * d - c;
    double t = ss + y;
    c = (t - ss) - y;
    ss = t;
  }
  if (values.size() > 1) r.std_error = std::sqrt(ss / (n * (n - 1.0)));
  return r;
}

}  // namespace triax
