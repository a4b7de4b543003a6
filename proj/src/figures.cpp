#include "jumpdrift/figures.hpp"

#include <cmath>
#include <ostream>

#include "jumpdrift/black_scholes.hpp"
#include "jumpdrift/csv.hpp"
#include "jumpdrift/errors.hpp"
#include "jumpdrift/hedging.hpp"
#include "jumpdrift/invest.hpp"
#include "jumpdrift/measure.hpp"
#include "jumpdrift/pide.hpp"

namespace jumpdrift {

namespace {

constexpr double kStrike = 100.0;
constexpr double kMaturity = 1.0;

// Hedge curves are written on the grid nodes inside this window.
constexpr double kHedgeLo = 25.0;
constexpr double kHedgeHi = 400.0;

std::string beta_tag(double beta) { return format_double(beta); }

double put_price(const MarketParams& market, const PricingMethod& method, double strike) {
  const ClaimSpec put{Put{strike}, kMaturity};
  return price_claim(market, pricing_measure(market, method), put, kFigureSpot).value;
}

double put_vol(double price, double strike, double rate) {
  return implied_vol(price, kFigureSpot, strike, rate, kMaturity, OptionKind::Put);
}

// Rows start with the moneyness K/S followed by the volatility columns; both
// moneyness conventions and the strike come after them.
void append_moneyness(std::vector<CsvWriter::Cell>& cells, double strike) {
  cells.emplace_back(strike / kFigureSpot);
  cells.emplace_back(kFigureSpot / strike);
  cells.emplace_back(strike);
}

void append_moneyness_header(std::vector<std::string>& header) {
  for (const char* c : {"moneyness_k_over_s", "moneyness_s_over_k", "strike"}) header.emplace_back(c);
}

// Implied vols of the three frameworks (Figs. 1 and 2).
void framework_vols(double mu_tilde, std::ostream& out) {
  const MarketParams market = figure_market(mu_tilde);
  const PricingMethod methods[] = {
      Merton{}, MarginalUtility{PowerUtility{1.0}, optimal_investment(market, PowerUtility{1.0})},
      MinimalVariance{}};
  std::vector<std::string> header = {"moneyness", "iv_merton", "iv_utility_log", "iv_minvar",
                                     "iv_reference"};
  append_moneyness_header(header);
  for (const char* c : {"price_merton", "price_utility_log", "price_minvar"}) header.emplace_back(c);
  CsvWriter csv(out, header);
  const double ref = reference_vol(market);
  for (const double k : figure_strikes()) {
    std::vector<CsvWriter::Cell> cells = {k / kFigureSpot};
    double prices[3];
    for (int i = 0; i < 3; ++i) prices[i] = put_price(market, methods[i], k);
    for (const double p : prices) cells.emplace_back(put_vol(p, k, market.rate));
    cells.emplace_back(ref);
    append_moneyness(cells, k);
    for (const double p : prices) cells.emplace_back(p);
    csv.row(cells);
  }
}

void risk_aversion_differences(std::ostream& out) {
  const MarketParams market = figure_market(0.05);
  const std::vector<double> betas = {2.0, 5.0, 10.0, 100.0, 1000.0};
  std::vector<std::string> header = {"moneyness"};
  for (const double b : betas) header.push_back("diff_beta_" + beta_tag(b));
  header.emplace_back("diff_exponential");
  header.emplace_back("iv_beta_1");
  append_moneyness_header(header);
  CsvWriter csv(out, header);

  const auto utility_method = [&](const UtilitySpec& u) -> PricingMethod {
    return MarginalUtility{u, optimal_investment(market, u)};
  };
  std::vector<PricingMethod> methods;
  for (const double b : betas) methods.push_back(utility_method(PowerUtility{b}));
  methods.push_back(utility_method(ExponentialUtility{1.0}));
  const PricingMethod log_method = utility_method(PowerUtility{1.0});

  for (const double k : figure_strikes()) {
    std::vector<CsvWriter::Cell> cells = {k / kFigureSpot};
    const double base = put_vol(put_price(market, log_method, k), k, market.rate);
    for (const auto& m : methods)
      cells.emplace_back(put_vol(put_price(market, m, k), k, market.rate) - base);
    cells.emplace_back(base);
    append_moneyness(cells, k);
    csv.row(cells);
  }
}

const std::vector<double>& implied_drift_betas() {
  static const std::vector<double> betas = {1.0, 2.0, 5.0, 10.0};
  return betas;
}

MarketParams implied_drift_market(double beta, double pi_tilde) {
  MarketParams market = figure_market_without_drift();
  market.mu = implied_drift(Fraction{pi_tilde}, market, PowerUtility{beta});
  return market;
}

void implied_drift_vols(std::ostream& out) {
  const double pi = 0.5;
  std::vector<std::string> header = {"moneyness"};
  std::vector<MarketParams> markets;
  std::vector<PricingMethod> methods;
  for (const double b : implied_drift_betas()) {
    header.push_back("iv_beta_" + beta_tag(b));
    markets.push_back(implied_drift_market(b, pi));
    methods.emplace_back(MarginalUtility{PowerUtility{b}, Fraction{pi}});
  }
  header.emplace_back("iv_black_scholes");
  append_moneyness_header(header);
  for (const double b : implied_drift_betas()) header.push_back("mu_beta_" + beta_tag(b));
  CsvWriter csv(out, header);
  for (const double k : figure_strikes()) {
    std::vector<CsvWriter::Cell> cells = {k / kFigureSpot};
    for (std::size_t i = 0; i < markets.size(); ++i)
      cells.emplace_back(put_vol(put_price(markets[i], methods[i], k), k, 0.0));
    cells.emplace_back(markets.front().sigma);
    append_moneyness(cells, k);
    for (const auto& m : markets) cells.emplace_back(m.mu);
    csv.row(cells);
  }
}

void write_curves(const std::vector<HedgeCurve>& curves, std::ostream& out) {
  CsvWriter csv(out, {"s", "units_of_asset", "wealth_in_asset", "label"});
  for (const auto& c : curves)
    for (Eigen::Index i = 0; i < c.s.size(); ++i)
      if (c.s[i] >= kHedgeLo && c.s[i] <= kHedgeHi)
        csv.row({c.s[i], c.units_of_asset[i], c.wealth_in_asset[i], c.label});
}

PideSolution figure_solution(const MarketParams& market, const PricingMethod& method) {
  const ClaimSpec put{Put{kStrike}, kMaturity};
  return solve_pide(pricing_measure(market, method), put, market, default_grid(put, market),
                    method_label(method));
}

std::vector<HedgeCurve> hedge_comparison(bool with_price_derivative) {
  const MarketParams market = figure_market(0.05);
  const PricingMethod log_method =
      MarginalUtility{PowerUtility{1.0}, optimal_investment(market, PowerUtility{1.0})};
  const PideSolution merton = figure_solution(market, Merton{});
  const PideSolution utility = figure_solution(market, log_method);
  std::vector<HedgeCurve> curves = {
      delta_hedge(merton, 0.0),
      marginal_optimal_hedge(utility, market, hedge_weights(market, log_method), 0.0)};
  if (with_price_derivative)
    curves.push_back(derivative_of_price_hedge(utility, 0.0));
  else
    curves.push_back(minimal_variance_hedge(figure_solution(market, MinimalVariance{}), market, 0.0));
  return curves;
}

void implied_drift_hedges(std::ostream& out) {
  const double pi = 0.5;
  std::vector<HedgeCurve> curves;
  for (const double b : implied_drift_betas()) {
    const MarketParams market = implied_drift_market(b, pi);
    const PricingMethod method = MarginalUtility{PowerUtility{b}, Fraction{pi}};
    HedgeCurve c = marginal_optimal_hedge(figure_solution(market, method), market,
                                          hedge_weights(market, method), 0.0);
    c.label = "marginal_optimal_beta_" + beta_tag(b);
    curves.push_back(std::move(c));
  }
  write_curves(curves, out);
}

}  // namespace

MarketParams figure_market_without_drift() {
  return MarketParams{0.0, 0.2, 0.0, JumpMeasure({JumpAtom::from_relative(-0.25, 0.25)})};
}

MarketParams figure_market(double mu_tilde) {
  return figure_market_without_drift().with_average_drift(mu_tilde);
}

double reference_vol(const MarketParams& market) {
  double var = market.sigma * market.sigma;
  for (const auto& a : market.jumps.atoms()) var += a.z * a.z * a.intensity;
  return std::sqrt(var);
}

std::vector<double> figure_strikes() {
  std::vector<double> k;
  for (int i = 50; i <= 200; i += 5) k.push_back(i);
  return k;
}

std::vector<std::string> figure_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

void reproduce_figure(const std::string& name, std::ostream& out) {
  if (name == "fig1") framework_vols(0.05, out);
  else if (name == "fig2") framework_vols(-0.05, out);
  else if (name == "fig3") risk_aversion_differences(out);
  else if (name == "fig4") implied_drift_vols(out);
  else if (name == "fig5") write_curves(hedge_comparison(false), out);
  else if (name == "fig6") write_curves(hedge_comparison(true), out);
  else if (name == "fig7") implied_drift_hedges(out);
  else throw UnknownFigure("unknown figure '" + name + "' (expected fig1 to fig7)");
}

}  // namespace jumpdrift
