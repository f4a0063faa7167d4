#include "triax/distribution.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "triax/error.hpp"
#include "triax/format.hpp"
#include "triax/quadrature.hpp"

namespace triax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGhNodes = 200;
const double kHalfLogPi = 0.5 * std::log(3.14159265358979323846264338327950288);

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::parse, msg);
}

}  // namespace

DistributionSpec zero_dist() { return DistributionSpec{DistKind::zero, 0.0, 0.0}; }

DistributionSpec constant(double c) {
  require(std::isfinite(c) && c >= 0.0, "constant(c): requires c >= 0");
  if (c == 0.0) return zero_dist();
  return DistributionSpec{DistKind::constant, c, 0.0};
}

DistributionSpec lognormal(double mu, double sigma) {
  require(std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0,
          "lognormal(mu,sigma): requires sigma > 0");
  return DistributionSpec{DistKind::lognormal, mu, sigma};
}

DistributionSpec pareto(double a, double xm) {
  require(std::isfinite(a) && a > 0.0 && std::isfinite(xm) && xm > 0.0,
          "pareto(a,xm): requires a > 0 and xm > 0");
  return DistributionSpec{DistKind::pareto, a, xm};
}

DistributionSpec uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi,
          "uniform(lo,hi): requires 0 <= lo < hi");
  return DistributionSpec{DistKind::uniform, lo, hi};
}

DistributionSpec garch_entry(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && b >= 0.0 && a + b > 0.0,
          "garch_entry(a,b): requires a,b >= 0 and a+b > 0");
  return DistributionSpec{DistKind::garch_entry, a, b};
}

double sample(const DistributionSpec& d, double u) {
  switch (d.kind) {
    case DistKind::zero:
      return 0.0;
    case DistKind::constant:
      return d.p1;
    case DistKind::lognormal:
      return std::exp(d.p1 + d.p2 * u);
    case DistKind::pareto:
      // u uniform(0,1): inverse survival xm (1-u)^(-1/a).
      return d.p2 * std::exp(-std::log1p(-u) / d.p1);
    case DistKind::uniform:
      return d.p1 + u * (d.p2 - d.p1);
    case DistKind::garch_entry:
      return d.p1 * u * u + d.p2;
  }
  return 0.0;
}

double draw(const DistributionSpec& d, Rng& rng) {
  switch (d.kind) {
    case DistKind::zero:
      return 0.0;
    case DistKind::constant:
      return d.p1;
    case DistKind::lognormal:
    case DistKind::garch_entry:
      return sample(d, rng.normal01());
    case DistKind::pareto:
    case DistKind::uniform:
      return sample(d, rng.uniform01());
  }
  return 0.0;
}

namespace detail {

double garch_moment_gh(double a, double b, double s, int nodes) {
  const GaussHermiteRule& rule = gauss_hermite(nodes);
  std::vector<double> terms(rule.x.size());
  for (size_t i = 0; i < rule.x.size(); ++i) {
    double z2 = 2.0 * rule.x[i] * rule.x[i];  // Z = sqrt(2) x
    terms[i] = rule.log_w[i] + s * std::log(a * z2 + b);
  }
  return std::exp(log_sum_exp(terms) - kHalfLogPi);
}

double garch_log_moment_gh(double a, double b, double s, int nodes) {
  const GaussHermiteRule& rule = gauss_hermite(nodes);
  std::vector<double> pos, neg;
  pos.reserve(rule.x.size());
  neg.reserve(rule.x.size());
  for (size_t i = 0; i < rule.x.size(); ++i) {
    double z2 = 2.0 * rule.x[i] * rule.x[i];
    double lf = std::log(a * z2 + b);
    double t = rule.log_w[i] + s * lf;
    if (lf > 0.0)
      pos.push_back(t + std::log(lf));
    else if (lf < 0.0)
      neg.push_back(t + std::log(-lf));
  }
  double p = pos.empty() ? 0.0 : std::exp(log_sum_exp(pos) - kHalfLogPi);
  double n = neg.empty() ? 0.0 : std::exp(log_sum_exp(neg) - kHalfLogPi);
  return p - n;
}

}  // namespace detail

double moment(const DistributionSpec& d, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("moment: requires s >= 0");
  if (s == 0.0) return 1.0;
  switch (d.kind) {
    case DistKind::zero:
      return 0.0;
    case DistKind::constant:
      return std::exp(s * std::log(d.p1));
    case DistKind::lognormal:
      return std::exp(s * d.p1 + 0.5 * s * s * d.p2 * d.p2);
    case DistKind::pareto:
      if (s >= d.p1) return kInf;
      return d.p1 * std::exp(s * std::log(d.p2)) / (d.p1 - s);
    case DistKind::uniform: {
      double hi_pow = std::exp((s + 1.0) * std::log(d.p2));
      double lo_pow = d.p1 == 0.0 ? 0.0 : std::exp((s + 1.0) * std::log(d.p1));
      return (hi_pow - lo_pow) / ((s + 1.0) * (d.p2 - d.p1));
    }
    case DistKind::garch_entry: {
      double a = d.p1, b = d.p2;
      if (a == 0.0) return std::exp(s * std::log(b));
      if (b == 0.0)
        return std::exp(s * std::log(2.0 * a) + std::lgamma(s + 0.5) - std::lgamma(0.5));
      return detail::garch_moment_gh(a, b, s, kGhNodes);
    }
  }
  return 0.0;
}

double log_moment(const DistributionSpec& d, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("log_moment: requires s >= 0");
  double m = moment(d, s);
  if (!std::isfinite(m))
    throw Error(Errc::divergent, "log_moment: E[X^s] diverges at s = " + fmt_double(s));
  switch (d.kind) {
    case DistKind::zero:
      // X = 0: the integrand x^s log x is 0 for s > 0 and -inf at s = 0.
      return s > 0.0 ? 0.0 : -kInf;
    case DistKind::constant:
      return m * std::log(d.p1);
    case DistKind::lognormal:
      return (d.p1 + d.p2 * d.p2 * s) * m;
    case DistKind::pareto:
      return m * (std::log(d.p2) + 1.0 / (d.p1 - s));
    case DistKind::uniform: {
      double hi_term = std::exp((s + 1.0) * std::log(d.p2)) * std::log(d.p2);
      double lo_term = d.p1 == 0.0 ? 0.0 : std::exp((s + 1.0) * std::log(d.p1)) * std::log(d.p1);
      return (hi_term - lo_term) / ((s + 1.0) * (d.p2 - d.p1)) - m / (s + 1.0);
    }
    case DistKind::garch_entry: {
      double a = d.p1, b = d.p2;
      if (a == 0.0) return m * std::log(b);
      if (b == 0.0) return m * (std::log(2.0 * a) + digamma(s + 0.5));
      return detail::garch_log_moment_gh(a, b, s, kGhNodes);
    }
  }
  return 0.0;
}

bool is_arithmetic(const DistributionSpec& d) {
  switch (d.kind) {
    case DistKind::zero:
    case DistKind::constant:
      return true;
    case DistKind::garch_entry:
      return d.p1 == 0.0;
    default:
      return false;
  }
}

namespace {

std::string strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& text) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    require(pos == text.size(), "bad numeric argument");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(Errc::parse, "bad numeric argument: '" + text + "'");
  }
}

}  // namespace

DistributionSpec parse_literal(const std::string& text) {
  std::string t = strip(text);
  if (t == "zero") return zero_dist();

  size_t open = t.find('(');
  require(open != std::string::npos && t.back() == ')',
          "distribution literal must be 'zero' or 'name(args)': '" + text + "'");
  std::string name = strip(t.substr(0, open));
  std::string args = t.substr(open + 1, t.size() - open - 2);

  std::vector<double> vals;
  size_t start = 0;
  while (true) {
    size_t comma = args.find(',', start);
    std::string piece = comma == std::string::npos ? args.substr(start) : args.substr(start, comma - start);
    vals.push_back(parse_number(strip(piece)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  auto arity = [&](size_t n) {
    require(vals.size() == n, "wrong argument count for '" + name + "'");
  };
  if (name == "constant") {
    arity(1);
    return constant(vals[0]);
  }
  if (name == "lognormal") {
    arity(2);
    return lognormal(vals[0], vals[1]);
  }
  if (name == "pareto") {
    arity(2);
    return pareto(vals[0], vals[1]);
  }
  if (name == "uniform") {
    arity(2);
    return uniform(vals[0], vals[1]);
  }
  if (name == "garch_entry") {
    arity(2);
    return garch_entry(vals[0], vals[1]);
  }
  throw Error(Errc::parse, "unknown distribution '" + name + "'");
}

std::string format_literal(const DistributionSpec& d) {
  switch (d.kind) {
    case DistKind::zero:
      return "zero";
    case DistKind::constant:
      return "constant(" + fmt_double(d.p1) + ")";
    case DistKind::lognormal:
      return "lognormal(" + fmt_double(d.p1) + "," + fmt_double(d.p2) + ")";
    case DistKind::pareto:
      return "pareto(" + fmt_double(d.p1) + "," + fmt_double(d.p2) + ")";
    case DistKind::uniform:
      return "uniform(" + fmt_double(d.p1) + "," + fmt_double(d.p2) + ")";
    case DistKind::garch_entry:
      return "garch_entry(" + fmt_double(d.p1) + "," + fmt_double(d.p2) + ")";
  }
  return "zero";
}

}  // namespace triax
