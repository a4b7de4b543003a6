#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "jumpdrift/measure.hpp"
#include "jumpdrift/model.hpp"

namespace jumpdrift {

/// Log-uniform price grid and time stepping for solve_pide.
struct GridSpec {
  double s_min = 12.5;
  double s_max = 800.0;
  int n_space = 400;
  int n_time = 200;
  /// Leading Crank-Nicolson steps replaced by two implicit half steps each.
  int rannacher_steps = 2;
  /// Time steps are refined until dt * sum |lambda_bar| <= this cap.
  double max_jump_rate_dt = 0.5;
  /// Jump images beyond the grid use the payoff's affine asymptote. When
  /// false such images raise GridError.
  bool extrapolate = true;
  /// Also solve on a grid refined 2x in both directions and record the
  /// largest relative change over the middle third of the grid.
  bool self_check = false;
};

void validate_grid(const GridSpec& grid);

/// Grid on [K/8, 8K] widened by the largest downward/upward jump, with the
/// reference price on a node and, when the market has jumps, a spacing that
/// divides the log size of the most intense atom so its images fall on nodes.
/// n_time scales with the maturity (n_time steps per year, at least 8).
GridSpec default_grid(const ClaimSpec& claim, const MarketParams& market,
                      int n_space = 400, int n_time = 200);

/// Value surface v_t(s). Row k of `values` holds time `times[k]`; times run
/// from 0 to the maturity.
struct PideSolution {
  GridSpec grid;
  Eigen::VectorXd log_s;
  Eigen::VectorXd s;
  Eigen::VectorXd times;
  Eigen::MatrixXd values;
  PricingMeasure measure;
  Eigen::VectorXd log_jumps;
  double rate = 0.0;
  double maturity = 0.0;
  AffineTail lower_tail;
  AffineTail upper_tail;
  bool floor_tails_at_zero = false;
  std::string label;
  std::optional<double> self_check_change;

  double spacing() const { return log_s[1] - log_s[0]; }

  /// Grid values at time t, linearly interpolated between time levels.
  Eigen::VectorXd at_time(double t) const;

  /// Value at an arbitrary price for a row of grid values belonging to time
  /// t: linear in log s on the grid, asymptote outside. Throws GridError
  /// outside the grid when extrapolation is disabled.
  double value_at(const Eigen::VectorXd& row, double price, double t) const;

  double value_at(double price, double t) const { return value_at(at_time(t), price, t); }

  double asymptote(double price, double t) const;
};

/// Backward solution of
///   v_t + (r + mu_Q) s v_s + sigma^2/2 s^2 v_ss - r v + sum_i lbar_i (v(e^{z_i} s) - v(s)) = 0
/// from the payoff at maturity. Diffusion, drift and discounting are implicit
/// (Crank-Nicolson after a Rannacher start); the jump sum is evaluated on the
/// grid and iterated to a fixed point within each step.
PideSolution solve_pide(const PricingMeasure& measure, const ClaimSpec& claim,
                        const MarketParams& market, const GridSpec& grid,
                        std::string label = "custom");

/// CSV with header `t,s,value`, rows ordered by time then price.
void write_solution_csv(const PideSolution& solution, std::ostream& out);

enum class PricingRoute { Series, Pide };

struct PriceQuote {
  double value = 0.0;
  PricingRoute route = PricingRoute::Pide;
};

/// Price at time 0 and spot `s`. Without an explicit grid, vanilla claims on
/// markets with at most one atom and a nonnegative adjusted intensity use the
/// series pricer; everything else (in particular signed measures) goes to
/// solve_pide on `grid` or default_grid.
PriceQuote price_claim(const MarketParams& market, const PricingMeasure& measure,
                       const ClaimSpec& claim, double s,
                       const std::optional<GridSpec>& grid = std::nullopt);

}  // namespace jumpdrift
