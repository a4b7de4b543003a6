#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "jumpdrift/measure.hpp"
#include "jumpdrift/pide.hpp"

namespace jumpdrift {

/// Hedge on the solution grid, both as units of the asset and as wealth
/// invested (units * s).
struct HedgeCurve {
  Eigen::VectorXd s;
  Eigen::VectorXd units_of_asset;
  Eigen::VectorXd wealth_in_asset;
  std::string label;

  /// Units at an arbitrary price inside the grid, linear in log s.
  double units_at(double price) const;
};

/// dv/ds on the grid: central differences in log s, second-order one-sided
/// at the ends.
Eigen::VectorXd price_derivative(const PideSolution& solution, const Eigen::VectorXd& row);

/// Merton: hedge the diffusion only, units = dv/ds.
HedgeCurve delta_hedge(const PideSolution& solution, double t);

/// Weighted blend of dv/ds and the per-atom jump slopes
/// (v(e^z s) - v(s)) / ((e^z - 1) s):
///   units = [sigma^2 v_s + sum slope_i (e^z_i-1)^2 w_i nu_i] / [sigma^2 + sum (e^z_i-1)^2 w_i nu_i]
HedgeCurve marginal_optimal_hedge(const PideSolution& solution, const MarketParams& market,
                                  const HedgeWeights& weights, double t);

/// The same blend with unit weights.
HedgeCurve minimal_variance_hedge(const PideSolution& solution, const MarketParams& market,
                                  double t);

/// dv/ds of a utility-priced surface.
HedgeCurve derivative_of_price_hedge(const PideSolution& solution, double t);

/// CSV with header `s,units_of_asset,wealth_in_asset,label`.
void write_hedge_csv(std::span<const HedgeCurve> curves, std::ostream& out);

}  // namespace jumpdrift
