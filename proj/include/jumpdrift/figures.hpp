#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jumpdrift/model.hpp"

namespace jumpdrift {

/// Market of the fixed-jump examples: sigma = 0.2, r = 0, one atom with
/// relative size -0.25 and intensity 0.25, drift set so that the average
/// drift equals `mu_tilde`.
MarketParams figure_market(double mu_tilde);

/// The same market with the drift left at zero (for implied-drift runs).
MarketParams figure_market_without_drift();

/// sqrt(sigma^2 + sum z^2 intensity): volatility of the annualized log
/// return variance.
double reference_vol(const MarketParams& market);

/// Strikes 50, 55, ..., 200 against spot 100.
std::vector<double> figure_strikes();
constexpr double kFigureSpot = 100.0;

/// Names accepted by reproduce_figure, in order.
std::vector<std::string> figure_names();

/// Writes the data behind a figure as CSV. Throws UnknownFigure.
void reproduce_figure(const std::string& name, std::ostream& out);

}  // namespace jumpdrift
