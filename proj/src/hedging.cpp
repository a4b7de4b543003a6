#include "jumpdrift/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jumpdrift/csv.hpp"

namespace jumpdrift {

namespace {

HedgeCurve make_curve(const PideSolution& solution, Eigen::VectorXd units, std::string label) {
  HedgeCurve curve;
  curve.s = solution.s;
  curve.wealth_in_asset = (units.array() * solution.s.array()).matrix();
  curve.units_of_asset = std::move(units);
  curve.label = std::move(label);
  return curve;
}

Eigen::VectorXd blended_hedge(const PideSolution& solution, const MarketParams& market,
                              const Eigen::VectorXd& weights, double t) {
  if (weights.size() != static_cast<Eigen::Index>(market.jumps.size()))
    throw ValidationError("hedge weights do not match the market's jump atoms");
  const Eigen::VectorXd row = solution.at_time(t);
  const Eigen::VectorXd dv = price_derivative(solution, row);
  const double s2 = market.sigma * market.sigma;

  Eigen::VectorXd jump_mass(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double j = market.jumps[static_cast<std::size_t>(i)].relative_size();
    jump_mass[i] = j * j * weights[i] * market.jumps[static_cast<std::size_t>(i)].intensity;
  }
  const double denominator = s2 + jump_mass.sum();

  Eigen::VectorXd units(row.size());
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    const double s = solution.s[k];
    double numerator = s2 * dv[k];
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const auto& atom = market.jumps[static_cast<std::size_t>(i)];
      const double image = solution.value_at(row, s * std::exp(atom.z), t);
      numerator += (image - row[k]) / (atom.relative_size() * s) * jump_mass[i];
    }
    units[k] = numerator / denominator;
  }
  return units;
}

}  // namespace

double HedgeCurve::units_at(double price) const {
  const Eigen::Index n = s.size();
  const double x = std::log(price);
  const double x0 = std::log(s[0]);
  const double h = (std::log(s[n - 1]) - x0) / static_cast<double>(n - 1);
  const double f = (x - x0) / h;
  if (f < -1e-9 || f > static_cast<double>(n - 1) + 1e-9)
    throw GridError("price " + std::to_string(price) + " outside the hedge curve");
  const double fc = std::clamp(f, 0.0, static_cast<double>(n - 1));
  const Eigen::Index left = std::min<Eigen::Index>(static_cast<Eigen::Index>(fc), n - 2);
  const double w = fc - static_cast<double>(left);
  return (1.0 - w) * units_of_asset[left] + w * units_of_asset[left + 1];
}

Eigen::VectorXd price_derivative(const PideSolution& solution, const Eigen::VectorXd& row) {
  const Eigen::Index n = row.size();
  const double h = solution.spacing();
  Eigen::VectorXd dxi(n);
  dxi[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h);
  dxi[n - 1] = (3.0 * row[n - 1] - 4.0 * row[n - 2] + row[n - 3]) / (2.0 * h);
  dxi.segment(1, n - 2) = (row.tail(n - 2) - row.head(n - 2)) / (2.0 * h);
  return (dxi.array() / solution.s.array()).matrix();
}

HedgeCurve delta_hedge(const PideSolution& solution, double t) {
  return make_curve(solution, price_derivative(solution, solution.at_time(t)), "delta_merton");
}

HedgeCurve marginal_optimal_hedge(const PideSolution& solution, const MarketParams& market,
                                  const HedgeWeights& weights, double t) {
  return make_curve(solution, blended_hedge(solution, market, weights, t), "marginal_optimal");
}

HedgeCurve minimal_variance_hedge(const PideSolution& solution, const MarketParams& market,
                                  double t) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(market.jumps.size()));
  return make_curve(solution, blended_hedge(solution, market, ones, t), "minimal_variance");
}

HedgeCurve derivative_of_price_hedge(const PideSolution& solution, double t) {
  return make_curve(solution, price_derivative(solution, solution.at_time(t)),
                    "price_derivative");
}

void write_hedge_csv(std::span<const HedgeCurve> curves, std::ostream& out) {
  CsvWriter csv(out, {"s", "units_of_asset", "wealth_in_asset", "label"});
  for (const auto& curve : curves)
    for (Eigen::Index k = 0; k < curve.s.size(); ++k)
      csv.row({curve.s[k], curve.units_of_asset[k], curve.wealth_in_asset[k], curve.label});
}

}  // namespace jumpdrift
