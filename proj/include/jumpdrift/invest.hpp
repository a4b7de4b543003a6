#pragma once

#include <variant>

#include "jumpdrift/model.hpp"

namespace jumpdrift {

/// Optimal wealth fraction for power utility. Constant in time and wealth.
struct Fraction {
  double pi_tilde = 0.0;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Optimal amount for exponential utility, stored as pi_bar = alpha * pi.
struct Amount {
  double pi_bar = 0.0;
  double alpha = 1.0;
  double amount() const { return pi_bar / alpha; }
  friend bool operator==(const Amount&, const Amount&) = default;
};

using OptimalInvestment = std::variant<Fraction, Amount>;

/// Residual of the power-utility first-order condition
///   mu - pi beta sigma^2 + sum (e^z-1) (1 + pi (e^z-1))^{-beta} intensity.
double power_residual(const MarketParams& market, double beta, double pi_tilde);

/// Residual of the exponential-utility condition written in pi_bar:
///   mu - pi_bar sigma^2 + sum (e^z-1) e^{-pi_bar (e^z-1)} intensity.
double exponential_residual(const MarketParams& market, double pi_bar);

/// Open interval of fractions keeping 1 + pi (e^{z_i} - 1) > 0 for all atoms.
/// Unbounded sides are +-infinity.
struct AdmissibleInterval {
  double lower;
  double upper;
  bool contains(double pi) const { return pi > lower && pi < upper; }
};
AdmissibleInterval admissible_fractions(const JumpMeasure& jumps);

/// Throws DomainError unless 1 + pi (e^{z_i}-1) > 0 for every atom.
void check_fraction_admissible(const JumpMeasure& jumps, double pi_tilde);

Fraction optimal_fraction_power(const MarketParams& market, double beta);

/// Closed form for logarithmic utility with a single jump size. Throws
/// WrongMeasure unless the market has exactly one atom.
Fraction optimal_fraction_log_fixed_jump(const MarketParams& market);

/// Value under the square root of the single-atom log-utility closed form.
double log_fixed_jump_discriminant(const MarketParams& market);

Amount optimal_amount_exponential(const MarketParams& market, double alpha);

/// Solves the first-order condition for the drift given the strategy.
/// Fraction pairs with power utility, Amount with exponential utility; any
/// other pairing throws WrongMeasure. market.mu is ignored.
double implied_drift(const OptimalInvestment& target, const MarketParams& market,
                     const UtilitySpec& utility);

/// Optimal investment for the utility (dispatches on the utility kind).
OptimalInvestment optimal_investment(const MarketParams& market, const UtilitySpec& utility);

}  // namespace jumpdrift
