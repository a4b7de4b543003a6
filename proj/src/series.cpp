#include "jumpdrift/series.hpp"

#include <cmath>

namespace jumpdrift {

SeriesResult price_series_fixed_jump(double lambda_bar, double log_jump,
                                     const MarketParams& market, const ClaimSpec& claim,
                                     double s, double t) {
  if (!(lambda_bar >= 0.0)) throw NegativeIntensity("series pricer needs lambda_bar >= 0");
  if (!claim.is_vanilla()) throw ValidationError("series pricer handles puts and calls only");
  const double strike = claim.reference_price();
  const OptionKind kind = claim.is_put() ? OptionKind::Put : OptionKind::Call;
  const double tau = claim.maturity - t;
  if (tau <= 0.0) return {claim(s), 1};

  const double q = lambda_bar * std::expm1(log_jump);
  const double mean = lambda_bar * tau;
  constexpr int kMaxTerms = 200;
  constexpr double kTail = 1e-12;

  double weight = std::exp(-mean);
  double mass = 0.0;
  double value = 0.0;
  int k = 0;
  for (; k < kMaxTerms; ++k) {
    if (k > 0) weight *= mean / k;
    value += weight * black_scholes(s * std::exp(k * log_jump), strike, market.rate, q,
                                    market.sigma, tau, kind);
    mass += weight;
    if (1.0 - mass < kTail) break;
  }
  return {value, std::min(k + 1, kMaxTerms)};
}

}  // namespace jumpdrift
