#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumpdrift/measure.hpp"
#include "jumpdrift/model.hpp"
#include "jumpdrift/pide.hpp"

namespace jumpdrift {

enum class MethodName { Merton, Utility, MinimalVariance };
enum class DriftMode { DriftGiven, ImpliedDrift };

struct GridOverrides {
  std::optional<double> s_min;
  std::optional<double> s_max;
  std::optional<int> n_space;
  std::optional<int> n_time;
  friend bool operator==(const GridOverrides&, const GridOverrides&) = default;
};

/// Contents of a run configuration file:
///
///   [market]   mu | mu_tilde, sigma, rate, spot
///   [jumps]    atom = z, intensity      (repeatable; z is the log jump size)
///              atom_rel = e^z - 1, intensity
///   [utility]  kind = power | log | exponential, beta, alpha
///   [claim]    kind = put | call | custom, strike, maturity,
///              points = s:payoff, s:payoff, ...
///   [method]   name = merton | utility | minvar, mode = drift-given | implied-drift,
///              pi_star
///   [grid]     s_min, s_max, n_space, n_time
///   [output]   path
struct RunConfig {
  std::optional<double> mu;
  std::optional<double> mu_tilde;
  double sigma = 0.0;
  double rate = 0.0;
  double spot = 100.0;
  std::vector<JumpAtom> atoms;
  UtilitySpec utility = PowerUtility{1.0};
  ClaimSpec claim{Put{100.0}, 1.0};
  MethodName method = MethodName::Utility;
  DriftMode mode = DriftMode::DriftGiven;
  std::optional<double> pi_star;
  GridOverrides grid;
  std::string output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the text of a configuration file. Throws ConfigError with the line
/// number on malformed input and on violated section invariants.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes a configuration that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Market with the drift resolved: mu as given, from mu_tilde, or implied
/// by pi_star in implied-drift mode.
MarketParams resolve_market(const RunConfig& config);

PricingMethod resolve_method(const RunConfig& config, const MarketParams& market);
PricingMethod resolve_method(MethodName name, const UtilitySpec& utility,
                             const MarketParams& market);

GridSpec resolve_grid(const RunConfig& config, const ClaimSpec& claim,
                      const MarketParams& market);

MethodName parse_method_name(const std::string& name);

}  // namespace jumpdrift
