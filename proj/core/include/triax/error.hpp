#pragma once

#include <stdexcept>
#include <string>

namespace triax {

/// Failure classes surfaced by the toolkit. Split into input failures
/// (bad files, malformed models) and numeric failures (no root, overflow,
/// regime mismatches); the CLI maps the former to exit 1, the latter to 2.
enum class Errc {
  parse,             ///< model file or literal does not parse
  invalid_model,     ///< structural shape violation (dims, lower triangle, ...)
  no_root,           ///< moment never crosses 1 on the searchable range
  arithmetic,        ///< lattice-supported log-law, renewal theory unusable
  duplicate_indices, ///< tail indices closer than the separation tolerance
  eps_out_of_range,  ///< Lyapunov sufficiency exponent outside (0, min alpha)
  divergent,         ///< log-moment requested where the moment is infinite
  too_large,         ///< enumeration bounds exceeded
  not_dominated,     ///< decomposition asked for a self-dominant coordinate
  wrong_regime,      ///< Goldie constant asked for a dominated coordinate
  missing_u,         ///< recursion needs a u value that was not supplied
  degenerate,        ///< estimator input carries no tail information
  hypothesis_fail,   ///< empirical data violates a stated hypothesis bound
  overflow,          ///< iterate exceeded the floating range
  numeric_underflow, ///< matrix product underflowed despite rescaling
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

  /// True for failures caused by user input rather than numerics.
  bool is_input_error() const { return code_ == Errc::parse || code_ == Errc::invalid_model; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parse: return "PARSE";
    case Errc::invalid_model: return "INVALID_MODEL";
    case Errc::no_root: return "NO_ROOT";
    case Errc::arithmetic: return "ARITHMETIC";
    case Errc::duplicate_indices: return "DUPLICATE_INDICES";
    case Errc::eps_out_of_range: return "EPS_OUT_OF_RANGE";
    case Errc::divergent: return "DIVERGENT";
    case Errc::too_large: return "TOO_LARGE";
    case Errc::not_dominated: return "NOT_DOMINATED";
    case Errc::wrong_regime: return "WRONG_REGIME";
    case Errc::missing_u: return "MISSING_U";
    case Errc::degenerate: return "DEGENERATE";
    case Errc::hypothesis_fail: return "HYPOTHESIS_FAIL";
    case Errc::overflow: return "OVERFLOW";
    case Errc::numeric_underflow: return "NUMERIC_UNDERFLOW";
  }
  return "UNKNOWN";
}

}  // namespace triax
