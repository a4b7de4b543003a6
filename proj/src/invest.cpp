#include "jumpdrift/invest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roots.hpp"

namespace jumpdrift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_beta(double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta))
    throw ValidationError("power utility requires beta >= 1");
}

double power_residual_slope(const MarketParams& market, double beta, double pi) {
  double slope = -beta * market.sigma * market.sigma;
  for (const auto& atom : market.jumps.atoms()) {
    const double j = atom.relative_size();
    slope -= beta * j * j * atom.intensity * std::exp(-(beta + 1.0) * std::log1p(pi * j));
  }
  return slope;
}

double exponential_residual_slope(const MarketParams& market, double pi_bar) {
  double slope = -market.sigma * market.sigma;
  for (const auto& atom : market.jumps.atoms()) {
    const double j = atom.relative_size();
    slope -= j * j * atom.intensity * std::exp(-pi_bar * j);
  }
  return slope;
}

double jump_scale(const MarketParams& market) {
  double scale = std::abs(market.mu);
  for (const auto& atom : market.jumps.atoms())
    scale += std::abs(atom.relative_size()) * atom.intensity;
  return scale;
}

}  // namespace

double power_residual(const MarketParams& market, double beta, double pi_tilde) {
  double r = market.mu - pi_tilde * beta * market.sigma * market.sigma;
  for (const auto& atom : market.jumps.atoms()) {
    const double j = atom.relative_size();
    const double base = 1.0 + pi_tilde * j;
    if (!(base > 0.0)) throw DomainError("fraction leaves post-jump wealth nonpositive");
    r += j * atom.intensity * std::exp(-beta * std::log1p(pi_tilde * j));
  }
  return r;
}

double exponential_residual(const MarketParams& market, double pi_bar) {
  double r = market.mu - pi_bar * market.sigma * market.sigma;
  for (const auto& atom : market.jumps.atoms()) {
    const double j = atom.relative_size();
    r += j * atom.intensity * std::exp(-pi_bar * j);
  }
  return r;
}

AdmissibleInterval admissible_fractions(const JumpMeasure& jumps) {
  AdmissibleInterval interval{-kInf, kInf};
  for (const auto& atom : jumps.atoms()) {
    const double j = atom.relative_size();
    if (j < 0.0) {
      interval.upper = std::min(interval.upper, -1.0 / j);
    } else {
      interval.lower = std::max(interval.lower, -1.0 / j);
    }
  }
  return interval;
}

void check_fraction_admissible(const JumpMeasure& jumps, double pi_tilde) {
  for (const auto& atom : jumps.atoms()) {
    if (!(1.0 + pi_tilde * atom.relative_size() > 0.0))
      throw DomainError("fraction " + std::to_string(pi_tilde) +
                        " makes post-jump wealth nonpositive for atom z=" +
                        std::to_string(atom.z));
  }
}

Fraction optimal_fraction_power(const MarketParams& market, double beta) {
  validate_market(market);
  check_beta(beta);
  const auto residual = [&](double pi) { return power_residual(market, beta, pi); };
  const auto slope = [&](double pi) { return power_residual_slope(market, beta, pi); };

  const AdmissibleInterval interval = admissible_fractions(market.jumps);
  const double start = jump_scale(market) / (beta * market.sigma * market.sigma) + 1.0;

  // Finite ends sit at a jump singularity and are pulled in by 1e-9; infinite
  // ends are found by doubling, the residual being dominated by -pi beta sigma^2.
  const auto bracket_end = [&](double bound, double direction) {
    if (std::isfinite(bound)) return bound - direction * 1e-9 * std::max(1.0, std::abs(bound));
    double b = direction * start;
    for (int k = 0; k < 60 && (residual(b) > 0.0) == (direction > 0.0); ++k) b *= 2.0;
    return b;
  };
  const double lo = bracket_end(interval.lower, -1.0);
  const double hi = bracket_end(interval.upper, 1.0);
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (r_lo < 0.0 || r_hi > 0.0)
    throw NoSolution("power-utility first-order condition has no sign change on the "
                     "admissible interval");
  return {detail::bracketed_newton(residual, slope, lo, hi, r_lo, r_hi)};
}

double log_fixed_jump_discriminant(const MarketParams& market) {
  if (market.jumps.size() != 1)
    throw WrongMeasure("closed form requires exactly one jump atom");
  const double j = market.jumps[0].relative_size();
  const double lambda = market.jumps[0].intensity;
  const double s2 = market.sigma * market.sigma;
  const double lin = 1.0 - market.mu / s2 * j;
  return lin * lin + 4.0 * (market.mu + lambda * j) / s2 * j;
}

Fraction optimal_fraction_log_fixed_jump(const MarketParams& market) {
  validate_market(market);
  const double disc = log_fixed_jump_discriminant(market);
  const double j = market.jumps[0].relative_size();
  const double lambda = market.jumps[0].intensity;
  const double s2 = market.sigma * market.sigma;
  const double lin = 1.0 - market.mu / s2 * j;
  const double root = std::sqrt(disc);
  // -(lin - root) / (2j), rewritten as a product when lin and root nearly cancel.
  if (lin > 0.0) return {2.0 * (market.mu + lambda * j) / s2 / (lin + root)};
  return {-(lin - root) / (2.0 * j)};
}

Amount optimal_amount_exponential(const MarketParams& market, double alpha) {
  validate_market(market);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ValidationError("exponential utility requires alpha > 0");
  const auto residual = [&](double p) { return exponential_residual(market, p); };
  const auto slope = [&](double p) { return exponential_residual_slope(market, p); };
  double bound = jump_scale(market) / (market.sigma * market.sigma) + 1.0;
  for (int k = 0; k <= 60; ++k) {
    const double r_lo = residual(-bound);
    const double r_hi = residual(bound);
    if (r_lo >= 0.0 && r_hi <= 0.0)
      return {detail::bracketed_newton(residual, slope, -bound, bound, r_lo, r_hi), alpha};
    bound *= 2.0;
  }
  throw NoSolution("exponential-utility first-order condition: no bracket found");
}

double implied_drift(const OptimalInvestment& target, const MarketParams& market,
                     const UtilitySpec& utility) {
  if (!(market.sigma > 0.0)) throw ValidationError("sigma must be positive");
  const double s2 = market.sigma * market.sigma;
  if (const auto* fraction = std::get_if<Fraction>(&target)) {
    const auto* power = std::get_if<PowerUtility>(&utility);
    if (power == nullptr) throw WrongMeasure("a wealth fraction pairs with power utility");
    check_beta(power->beta);
    check_fraction_admissible(market.jumps, fraction->pi_tilde);
    double mu = power->beta * s2 * fraction->pi_tilde;
    for (const auto& atom : market.jumps.atoms()) {
      const double j = atom.relative_size();
      mu -= j * atom.intensity * std::exp(-power->beta * std::log1p(fraction->pi_tilde * j));
    }
    return mu;
  }
  const auto& amount = std::get<Amount>(target);
  if (!std::holds_alternative<ExponentialUtility>(utility))
    throw WrongMeasure("an amount pairs with exponential utility");
  if (!std::isfinite(amount.pi_bar)) throw DomainError("pi_bar must be finite");
  double mu = s2 * amount.pi_bar;
  for (const auto& atom : market.jumps.atoms()) {
    const double j = atom.relative_size();
    mu -= j * atom.intensity * std::exp(-amount.pi_bar * j);
  }
  return mu;
}

OptimalInvestment optimal_investment(const MarketParams& market, const UtilitySpec& utility) {
  validate_utility(utility);
  if (const auto* power = std::get_if<PowerUtility>(&utility))
    return optimal_fraction_power(market, power->beta);
  return optimal_amount_exponential(market, std::get<ExponentialUtility>(utility).alpha);
}

}  // namespace jumpdrift
