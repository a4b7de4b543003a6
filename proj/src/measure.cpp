#include "jumpdrift/measure.hpp"

#include <cmath>

namespace jumpdrift {

std::string method_label(const PricingMethod& method) {
  if (std::holds_alternative<Merton>(method)) return "merton";
  if (std::holds_alternative<MinimalVariance>(method)) return "minvar";
  const auto& mu = std::get<MarginalUtility>(method);
  if (const auto* p = std::get_if<PowerUtility>(&mu.utility)) {
    if (p->beta == 1.0) return "utility_log";
    return "utility_power";
  }
  return "utility_exponential";
}

void validate_method(const PricingMethod& method) {
  const auto* mu = std::get_if<MarginalUtility>(&method);
  if (mu == nullptr) return;
  validate_utility(mu->utility);
  const bool power = std::holds_alternative<PowerUtility>(mu->utility);
  const bool fraction = std::holds_alternative<Fraction>(mu->investment);
  if (power != fraction)
    throw WrongMeasure(power ? "power utility needs a wealth fraction"
                             : "exponential utility needs an amount");
}

double market_price_of_risk_alpha(const MarketParams& market) {
  const double s2 = market.sigma * market.sigma;
  return (market.mu + jump_moment(market.jumps, 1)) / (s2 + jump_moment(market.jumps, 2));
}

Eigen::VectorXd pricing_weights(const MarketParams& market, const PricingMethod& method) {
  validate_method(method);
  const Eigen::VectorXd j = market.jumps.relative_sizes();
  if (std::holds_alternative<Merton>(method)) return Eigen::VectorXd::Ones(j.size());
  if (std::holds_alternative<MinimalVariance>(method)) {
    const double alpha = market_price_of_risk_alpha(market);
    return (1.0 - alpha * j.array()).matrix();
  }
  const auto& mu = std::get<MarginalUtility>(method);
  if (const auto* p = std::get_if<PowerUtility>(&mu.utility)) {
    const double pi = std::get<Fraction>(mu.investment).pi_tilde;
    const Eigen::ArrayXd base = 1.0 + pi * j.array();
    if ((base <= 0.0).any())
      throw DomainError("pricing weight base 1 + pi (e^z - 1) is nonpositive");
    return (-p->beta * base.log()).exp().matrix();
  }
  const double pi_bar = std::get<Amount>(mu.investment).pi_bar;
  return (-pi_bar * j.array()).exp().matrix();
}

PricingMeasure pricing_measure(const MarketParams& market, const PricingMethod& method) {
  PricingMeasure measure;
  measure.adjusted_intensities =
      (market.jumps.intensities().array() * pricing_weights(market, method).array()).matrix();
  measure.drift_q = -market.jumps.relative_sizes().dot(measure.adjusted_intensities);
  measure.is_signed =
      measure.adjusted_intensities.size() > 0 && measure.adjusted_intensities.minCoeff() < 0.0;
  return measure;
}

HedgeWeights hedge_weights(const MarketParams& market, const PricingMethod& method) {
  validate_method(method);
  const Eigen::VectorXd j = market.jumps.relative_sizes();
  if (std::holds_alternative<Merton>(method))
    throw UnsupportedMethod("Merton hedging uses the plain delta and has no jump weights");
  if (std::holds_alternative<MinimalVariance>(method)) return Eigen::VectorXd::Ones(j.size());
  const auto& mu = std::get<MarginalUtility>(method);
  if (const auto* p = std::get_if<PowerUtility>(&mu.utility)) {
    const double pi = std::get<Fraction>(mu.investment).pi_tilde;
    const Eigen::ArrayXd base = 1.0 + pi * j.array();
    if ((base <= 0.0).any())
      throw DomainError("hedge weight base 1 + pi (e^z - 1) is nonpositive");
    return (-(p->beta + 1.0) * base.log()).exp().matrix();
  }
  const double pi_bar = std::get<Amount>(mu.investment).pi_bar;
  return (-pi_bar * j.array()).exp().matrix();
}

std::optional<std::string> signed_measure_warning(const PricingMeasure& measure) {
  if (!measure.is_signed) return std::nullopt;
  return "warning: minimal-variance measure is signed (min adjusted intensity " +
         std::to_string(measure.adjusted_intensities.minCoeff()) +
         "); positive claims may get negative prices";
}

}  // namespace jumpdrift
