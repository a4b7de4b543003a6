#pragma once

namespace jumpdrift {

enum class OptionKind { Put, Call };

double normal_cdf(double x);

/// Black-Scholes value with continuous dividend yield `q`. tau == 0 returns
/// the payoff.
double black_scholes(double s, double strike, double rate, double q, double sigma,
                     double tau, OptionKind kind);

/// dV/dsigma of black_scholes.
double black_scholes_vega(double s, double strike, double rate, double q, double sigma,
                          double tau);

/// dV/ds of black_scholes.
double black_scholes_delta(double s, double strike, double rate, double q, double sigma,
                           double tau, OptionKind kind);

/// Black-Scholes volatility (no dividends) reproducing `price`, searched in
/// [1e-4, 5]. Throws OutOfBounds if the price is outside the no-arbitrage
/// range or not attainable in that volatility range.
double implied_vol(double price, double s, double strike, double rate, double tau,
                   OptionKind kind);

}  // namespace jumpdrift
