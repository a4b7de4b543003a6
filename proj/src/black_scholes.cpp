#include "jumpdrift/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jumpdrift/errors.hpp"
#include "roots.hpp"

namespace jumpdrift {

namespace {

constexpr double kMinVol = 1e-4;
constexpr double kMaxVol = 5.0;

double payoff(double s, double strike, OptionKind kind) {
  return kind == OptionKind::Put ? std::max(strike - s, 0.0) : std::max(s - strike, 0.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_scholes(double s, double strike, double rate, double q, double sigma, double tau,
                     OptionKind kind) {
  if (tau <= 0.0) return payoff(s, strike, kind);
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(s / strike) + (rate - q) * tau) / vol + 0.5 * vol;
  const double d2 = d1 - vol;
  const double df_strike = strike * std::exp(-rate * tau);
  const double df_spot = s * std::exp(-q * tau);
  if (kind == OptionKind::Put) return df_strike * normal_cdf(-d2) - df_spot * normal_cdf(-d1);
  return df_spot * normal_cdf(d1) - df_strike * normal_cdf(d2);
}

double black_scholes_vega(double s, double strike, double rate, double q, double sigma,
                          double tau) {
  if (tau <= 0.0) return 0.0;
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(s / strike) + (rate - q) * tau) / vol + 0.5 * vol;
  return s * std::exp(-q * tau) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi) *
         std::sqrt(tau);
}

double black_scholes_delta(double s, double strike, double rate, double q, double sigma,
                           double tau, OptionKind kind) {
  if (tau <= 0.0) {
    if (kind == OptionKind::Put) return s < strike ? -1.0 : 0.0;
    return s > strike ? 1.0 : 0.0;
  }
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(s / strike) + (rate - q) * tau) / vol + 0.5 * vol;
  const double carry = std::exp(-q * tau);
  return kind == OptionKind::Put ? -carry * normal_cdf(-d1) : carry * normal_cdf(d1);
}

double implied_vol(double price, double s, double strike, double rate, double tau,
                   OptionKind kind) {
  if (!(tau > 0.0) || !(s > 0.0) || !(strike > 0.0))
    throw OutOfBounds("implied vol needs s, strike, tau > 0");
  const double df_strike = strike * std::exp(-rate * tau);
  const double lower = kind == OptionKind::Put ? std::max(df_strike - s, 0.0)
                                               : std::max(s - df_strike, 0.0);
  const double upper = kind == OptionKind::Put ? df_strike : s;
  if (!std::isfinite(price) || price < lower || price > upper)
    throw OutOfBounds("price " + std::to_string(price) + " outside no-arbitrage bounds [" +
                      std::to_string(lower) + ", " + std::to_string(upper) + "]");

  const auto f = [&](double v) { return black_scholes(s, strike, rate, 0.0, v, tau, kind) - price; };
  const auto df = [&](double v) { return black_scholes_vega(s, strike, rate, 0.0, v, tau); };
  const double f_lo = f(kMinVol);
  const double f_hi = f(kMaxVol);
  const double tol = 1e-10 * s;
  if (std::abs(f_lo) < tol && f_hi > 0.0 && f_lo >= 0.0) return kMinVol;
  if (f_lo > 0.0 || f_hi < 0.0)
    throw OutOfBounds("price " + std::to_string(price) +
                      " not attainable for volatilities in [1e-4, 5]");
  return detail::bracketed_newton(f, df, kMinVol, kMaxVol, f_lo, f_hi);
}

}  // namespace jumpdrift
