#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "jumpdrift/errors.hpp"

namespace jumpdrift {

/// One point mass of the jump measure: log jump size `z` occurring with
/// frequency `intensity` (per year).
struct JumpAtom {
  double z = 0.0;
  double intensity = 0.0;

  /// Relative jump size e^z - 1.
  double relative_size() const { return std::expm1(z); }

  /// Builds an atom from the relative size e^z - 1 instead of the log size.
  static JumpAtom from_relative(double relative_size, double intensity) {
    return {std::log1p(relative_size), intensity};
  }

  friend bool operator==(const JumpAtom&, const JumpAtom&) = default;
};

/// Finite jump measure. Continuous densities have to be discretized into
/// atoms by the caller. An empty measure is a pure diffusion.
class JumpMeasure {
 public:
  JumpMeasure() = default;
  explicit JumpMeasure(std::vector<JumpAtom> atoms) : atoms_(std::move(atoms)) {}

  std::span<const JumpAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const JumpAtom& operator[](std::size_t i) const { return atoms_[i]; }

  double total_intensity() const;

  /// Per-atom e^z - 1.
  Eigen::VectorXd relative_sizes() const;
  Eigen::VectorXd intensities() const;

  /// Same atoms with every intensity multiplied by `factor`.
  JumpMeasure scaled(double factor) const;

  friend bool operator==(const JumpMeasure&, const JumpMeasure&) = default;

 private:
  std::vector<JumpAtom> atoms_;
};

/// Real-world market. `mu` is the drift of the asset in discounted units,
/// i.e. the excess over `rate`; with rate = 0 the two coincide.
struct MarketParams {
  double mu = 0.0;
  double sigma = 0.0;
  double rate = 0.0;
  JumpMeasure jumps;

  /// mu + sum (e^z - 1) intensity: the expected return including jumps.
  double average_drift() const;

  /// Returns a copy whose drift is chosen so that average_drift() == mu_tilde.
  MarketParams with_average_drift(double mu_tilde) const;

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

struct PowerUtility {
  double beta = 1.0;  // beta == 1 is logarithmic utility
  friend bool operator==(const PowerUtility&, const PowerUtility&) = default;
};

struct ExponentialUtility {
  double alpha = 1.0;
  friend bool operator==(const ExponentialUtility&, const ExponentialUtility&) = default;
};

using UtilitySpec = std::variant<PowerUtility, ExponentialUtility>;

void validate_utility(const UtilitySpec& utility);

// Utility value and marginal utility. The multiplicative constant of the
// exponential utility is fixed to one.
double utility_value(const UtilitySpec& utility, double wealth);
double marginal_utility(const UtilitySpec& utility, double wealth);

struct Put {
  double strike = 0.0;
  friend bool operator==(const Put&, const Put&) = default;
};

struct Call {
  double strike = 0.0;
  friend bool operator==(const Call&, const Call&) = default;
};

/// Tabulated payoff, linearly interpolated between the nodes and linearly
/// extrapolated beyond them with the end segments.
struct CustomPayoff {
  std::vector<double> s;
  std::vector<double> payoff;
  friend bool operator==(const CustomPayoff&, const CustomPayoff&) = default;
};

/// Affine tail a + b*s of a payoff. The discounted expectation of a + b*S_T
/// under any martingale measure is a*e^{-r tau} + b*s, which gives the
/// boundary values of the pricing grid.
struct AffineTail {
  double a = 0.0;
  double b = 0.0;
  double discounted(double s, double rate, double tau) const {
    return a * std::exp(-rate * tau) + b * s;
  }
};

struct ClaimSpec {
  std::variant<Put, Call, CustomPayoff> payoff;
  double maturity = 1.0;

  bool is_vanilla() const { return !std::holds_alternative<CustomPayoff>(payoff); }
  bool is_put() const { return std::holds_alternative<Put>(payoff); }

  /// Strike for vanilla claims; for custom payoffs the midpoint of the table
  /// in log space. Used as a price scale.
  double reference_price() const;

  double operator()(double s) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& s) const;

  AffineTail lower_tail() const;
  AffineTail upper_tail() const;

  friend bool operator==(const ClaimSpec&, const ClaimSpec&) = default;
};

void validate_claim(const ClaimSpec& claim);

/// Checks every market invariant and returns the input unchanged.
/// Throws ValidationError naming the violated invariant.
MarketParams validate_market(const MarketParams& params);

/// sum_i w_i (e^{z_i} - 1)^k intensity_i. Unit weights when `weights` is empty.
double jump_moment(const JumpMeasure& jumps, int k,
                   std::span<const double> weights = {});

}  // namespace jumpdrift
