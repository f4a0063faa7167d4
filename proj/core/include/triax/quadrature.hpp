#pragma once

#include <vector>

namespace triax {

/// Gauss-Hermite rule for the weight exp(-x^2): integral f(x) e^{-x^2} dx
/// ~ sum w_i f(x_i). Weights are kept in log form as well, because for large
/// rules the extreme-node weights underflow a double while their logs do not;
/// expectation code sums in log space.
struct GaussHermiteRule {
  std::vector<double> x;
  std::vector<double> log_w;
};

/// Returns the cached n-point rule (computed once per n, thread-safe).
const GaussHermiteRule& gauss_hermite(int n);

/// log(sum(exp(terms))) with the usual max shift; -inf input terms are
/// skipped. Returns -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& terms);

/// Digamma function for positive arguments (recurrence up to x >= 6, then
/// the asymptotic series).
double digamma(double x);

}  // namespace triax
