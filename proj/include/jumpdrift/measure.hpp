#pragma once

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "jumpdrift/invest.hpp"
#include "jumpdrift/model.hpp"

namespace jumpdrift {

struct Merton {};

struct MarginalUtility {
  UtilitySpec utility;
  OptimalInvestment investment;
};

struct MinimalVariance {};

using PricingMethod = std::variant<Merton, MarginalUtility, MinimalVariance>;

std::string method_label(const PricingMethod& method);

/// Throws WrongMeasure when a MarginalUtility pairs power utility with an
/// Amount or exponential utility with a Fraction.
void validate_method(const PricingMethod& method);

/// Risk-adjusted jump intensities (aligned with the market's atoms) and the
/// drift that compensates them. Only minimal-variance measures can carry
/// negative intensities; `is_signed` flags that case.
struct PricingMeasure {
  Eigen::VectorXd adjusted_intensities;
  double drift_q = 0.0;
  bool is_signed = false;
};

PricingMeasure pricing_measure(const MarketParams& market, const PricingMethod& method);

/// Per-atom factor multiplying the real-world intensity in the pricing measure.
Eigen::VectorXd pricing_weights(const MarketParams& market, const PricingMethod& method);

/// (mu + int (e^z-1) dnu) / (sigma^2 + int (e^z-1)^2 dnu).
double market_price_of_risk_alpha(const MarketParams& market);

/// Per-atom weights entering the hedge formulas. Merton has none and throws
/// UnsupportedMethod.
using HedgeWeights = Eigen::VectorXd;
HedgeWeights hedge_weights(const MarketParams& market, const PricingMethod& method);

/// One-line warning for signed measures, empty otherwise.
std::optional<std::string> signed_measure_warning(const PricingMeasure& measure);

}  // namespace jumpdrift
