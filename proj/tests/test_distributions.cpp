#include <doctest.h>

#include <cmath>
#include <limits>

#include "triax/distribution.hpp"
#include "triax/error.hpp"
#include "triax/model.hpp"
#include "triax/rng.hpp"

using namespace triax;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Central-difference check of log_moment as the s-derivative of moment.
void check_derivative(const DistributionSpec& d, double s) {
  double h = 1e-5;
  double numeric = (moment(d, s + h) - moment(d, s - h)) / (2.0 * h);
  double exact = log_moment(d, s);
  CHECK(exact == doctest::Approx(numeric).epsilon(1e-5));
}

}  // namespace

TEST_CASE("constant moments") {
  DistributionSpec c = constant(2.5);
  CHECK(moment(c, 1.0) == doctest::Approx(2.5));
  CHECK(moment(c, 3.0) == doctest::Approx(15.625));
  CHECK(log_moment(c, 1.0) == doctest::Approx(2.5 * std::log(2.5)));
  check_derivative(c, 2.0);
}

TEST_CASE("lognormal moments match the closed form") {
  DistributionSpec d = lognormal(-1.0, 1.0);
  for (double s : {0.5, 1.0, 2.0, 3.5})
    CHECK(moment(d, s) == doctest::Approx(std::exp(-s + 0.5 * s * s)).epsilon(1e-12));
  CHECK(moment(d, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log_moment(d, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  check_derivative(d, 1.5);
}

TEST_CASE("pareto moments diverge at the shape") {
  DistributionSpec d = pareto(2.0, 1.0);
  CHECK(moment(d, 1.0) == doctest::Approx(2.0));
  CHECK(moment(d, 1.9) == doctest::Approx(2.0 / 0.1).epsilon(1e-12));
  CHECK(moment(d, 2.0) == kInf);
  CHECK(moment(d, 5.0) == kInf);
  CHECK_THROWS_AS(log_moment(d, 2.0), Error);
  check_derivative(d, 1.0);
}

TEST_CASE("uniform moments") {
  DistributionSpec d = uniform(0.0, 2.0);
  CHECK(moment(d, 1.0) == doctest::Approx(1.0));
  CHECK(moment(d, 2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  DistributionSpec e = uniform(1.0, 3.0);
  CHECK(moment(e, 2.0) == doctest::Approx((27.0 - 1.0) / (3.0 * 2.0)).epsilon(1e-12));
  check_derivative(e, 1.5);
}

TEST_CASE("zero law") {
  DistributionSpec z = zero_dist();
  CHECK(z.is_zero());
  CHECK(moment(z, 2.0) == 0.0);
  CHECK(constant(0.0).is_zero());
}

TEST_CASE("quadrature moments agree with a refined rule") {
  for (auto [a, b] : {std::pair{0.1, 0.5}, {0.3, 0.4}, {1.0, 0.1}}) {
    for (double s : {0.7, 2.3, 5.5}) {
      double coarse = detail::garch_moment_gh(a, b, s, 200);
      double fine = detail::garch_moment_gh(a, b, s, 400);
      // (a z^2 + b)^s has complex singularities at |z| = sqrt(b/a); the
      // closer they sit to the real axis the slower the rule converges, so
      // the b < a stress pair gets a wider (still sub-ppm) band.
      double eps = b < a ? 1e-6 : 1e-12;
      CHECK(coarse == doctest::Approx(fine).epsilon(eps));
    }
  }
}

TEST_CASE("quadratic-shock moments at integer orders") {
  DistributionSpec d = garch_entry(0.1, 0.5);
  // E(aZ^2 + b) = a + b; E(aZ^2 + b)^2 = 3a^2 + 2ab + b^2.
  CHECK(moment(d, 1.0) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(moment(d, 2.0) == doctest::Approx(3 * 0.01 + 2 * 0.05 + 0.25).epsilon(1e-10));
  check_derivative(d, 2.0);

  DistributionSpec pure = garch_entry(0.05, 0.0);
  // E(aZ^2)^s = (2a)^s Gamma(s + 1/2) / Gamma(1/2).
  CHECK(moment(pure, 1.0) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(moment(pure, 2.0) == doctest::Approx(3 * 0.05 * 0.05).epsilon(1e-10));
  double s = 2.7;
  double expect = std::exp(s * std::log(0.1) + std::lgamma(s + 0.5) - std::lgamma(0.5));
  CHECK(moment(pure, s) == doctest::Approx(expect).epsilon(1e-10));
  check_derivative(pure, 1.3);

  CHECK(moment(garch_entry(0.0, 0.8), 3.0) == doctest::Approx(0.512).epsilon(1e-12));
}

TEST_CASE("root solving") {
  CHECK(solve_alpha(lognormal(-1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(solve_alpha(lognormal(-0.5, 0.5)) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(solve_alpha(lognormal(-2.5, 1.0)) == doctest::Approx(5.0).epsilon(1e-9));

  double root = solve_alpha(pareto(3.0, 0.5));
  CHECK(moment(pareto(3.0, 0.5), root) == doctest::Approx(1.0).epsilon(1e-9));

  root = solve_alpha(garch_entry(0.1, 0.8));
  CHECK(moment(garch_entry(0.1, 0.8), root) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("root solving failure modes") {
  CHECK_THROWS_AS(solve_alpha(constant(0.5)), Error);
  CHECK_THROWS_AS(solve_alpha(constant(1.2)), Error);
  CHECK_THROWS_AS(solve_alpha(lognormal(0.5, 1.0)), Error);  // E log > 0
  try {
    solve_alpha(constant(0.5));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_root);
  }
}

TEST_CASE("arithmetic flags") {
  CHECK(is_arithmetic(constant(2.0)));
  CHECK(is_arithmetic(zero_dist()));
  CHECK(is_arithmetic(garch_entry(0.0, 0.7)));
  CHECK_FALSE(is_arithmetic(lognormal(0.0, 1.0)));
  CHECK_FALSE(is_arithmetic(pareto(2.0, 1.0)));
  CHECK_FALSE(is_arithmetic(uniform(0.0, 1.0)));
  CHECK_FALSE(is_arithmetic(garch_entry(0.1, 0.5)));
}

TEST_CASE("literal grammar round trips") {
  for (const char* text : {"constant(2.5)", "lognormal(-1,1)", "pareto(2,1)", "uniform(0,2)",
                           "garch_entry(0.1,0.5)", "zero"}) {
    DistributionSpec d = parse_literal(text);
    DistributionSpec again = parse_literal(format_literal(d));
    CHECK(d.kind == again.kind);
    CHECK(d.p1 == again.p1);
    CHECK(d.p2 == again.p2);
  }
  CHECK(parse_literal(" lognormal( -1 , 1 ) ").kind == DistKind::lognormal);
  CHECK_THROWS_AS(parse_literal("lognormal(1)"), Error);
  CHECK_THROWS_AS(parse_literal("gamma(1,1)"), Error);
  CHECK_THROWS_AS(parse_literal("constant(1) extra"), Error);
  CHECK_THROWS_AS(parse_literal("pareto(-1,1)"), Error);
  CHECK_THROWS_AS(parse_literal("uniform(2,1)"), Error);
  CHECK_THROWS_AS(parse_literal("lognormal(0,-1)"), Error);
}

TEST_CASE("sampling ranges and determinism") {
  Rng a(7, 1), b(7, 1), c(7, 2);
  bool all_equal = true, any_diff_stream = false;
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    all_equal = all_equal && (u == b.uniform01());
    any_diff_stream = any_diff_stream || (u != c.uniform01());
  }
  CHECK(all_equal);
  CHECK(any_diff_stream);

  Rng r(42, 9);
  for (int i = 0; i < 200; ++i) {
    CHECK(draw(pareto(2.0, 1.5), r) >= 1.5);
    double u = draw(uniform(0.25, 0.75), r);
    CHECK(u >= 0.25);
    CHECK(u <= 0.75);
    CHECK(draw(constant(3.0), r) == 3.0);
    CHECK(draw(lognormal(-1.0, 1.0), r) > 0.0);
    CHECK(draw(garch_entry(0.1, 0.5), r) >= 0.5);
  }
}

TEST_CASE("sample means track first moments") {
  Rng r(123, 5);
  const int n = 100000;
  double acc_ln = 0.0, acc_ge = 0.0;
  for (int i = 0; i < n; ++i) {
    acc_ln += draw(lognormal(-1.0, 1.0), r);
    acc_ge += draw(garch_entry(0.3, 0.4), r);
  }
  CHECK(acc_ln / n == doctest::Approx(moment(lognormal(-1.0, 1.0), 1.0)).epsilon(0.03));
  CHECK(acc_ge / n == doctest::Approx(0.7).epsilon(0.03));
}
