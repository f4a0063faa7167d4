#pragma once

#include <optional>
#include <string>
#include <vector>

#include "triax/estimators.hpp"
#include "triax/garch.hpp"
#include "triax/model.hpp"
#include "triax/simulate.hpp"

namespace triax {

/// Parsed model file. A file declares a recursion directly (dim / A / B
/// lines), a GARCH parameterization (garch.* lines), or both; resolve()
/// returns the direct recursion when present and the induced one otherwise.
struct ModelFile {
  std::optional<ModelSpec> sre;
  std::optional<GarchSpec> garch;

  const ModelSpec& resolve();

 private:
  std::optional<ModelSpec> resolved_;
};

/// Line-oriented grammar, 1-based indices:
///   dim = d
///   A[i][j] = <literal>      (j >= i; unset off-diagonal entries are zero)
///   B[i] = <literal>
///   garch.dim = d
///   garch.alpha0[i] = x
///   garch.alpha[i][j] = x
///   garch.beta[i][j] = x
///   garch.common_shock = true|false
/// '#' starts a comment. Every diagonal A entry and every B entry must be
/// assigned. Below-diagonal assignments and duplicate keys are errors.
ModelFile parse_model_file(const std::string& text);

ModelFile load_model_file(const std::string& path);

/// JSON / CSV artifact writers. Doubles use shortest round-trip formatting;
/// coordinates are 1-based in every artifact.
std::string profile_to_json(const TailProfile& profile);
std::string validation_to_json(const ValidationReport& report);
std::string estimates_to_json(const std::vector<TailEstimate>& estimates,
                              const std::vector<int>& coordinates, std::uint64_t seed);
std::string constants_to_json(const ConstantsReport& report, std::uint64_t seed);
std::string lyapunov_to_json(double eps, const LyapunovSufficiency& bound,
                             const LyapunovMcResult& mc);
std::string batch_to_csv(const std::vector<std::vector<double>>& states);
std::string traces_to_csv(const std::vector<DecompositionTrace>& traces);
std::string useq_to_csv(const USequence& u);
std::string survival_to_csv(const std::vector<double>& grid, const std::vector<double>& curve);
std::string garch_to_csv(const GarchPath& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace triax
