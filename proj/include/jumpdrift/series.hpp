#pragma once

#include "jumpdrift/black_scholes.hpp"
#include "jumpdrift/model.hpp"

namespace jumpdrift {

struct SeriesResult {
  double value = 0.0;
  int terms = 0;
};

/// Price of a vanilla claim under a single jump size `log_jump` occurring
/// with risk-adjusted intensity `lambda_bar`, as a Poisson mixture of
/// Black-Scholes prices with dividend yield lambda_bar (e^J - 1). The sum is
/// truncated once the remaining Poisson mass drops below 1e-12 (at most 200
/// terms). Only market.sigma and market.rate are used.
SeriesResult price_series_fixed_jump(double lambda_bar, double log_jump,
                                     const MarketParams& market, const ClaimSpec& claim,
                                     double s, double t);

}  // namespace jumpdrift
