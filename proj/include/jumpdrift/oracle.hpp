#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jumpdrift/invest.hpp"
#include "jumpdrift/model.hpp"

namespace jumpdrift {

// ---------------------------------------------------------------------------
// Discrete-time dynamic programming
// ---------------------------------------------------------------------------

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int nodes = 0;
};

/// Bracket and tolerance of the per-node strategy search. For power utility
/// the strategy is the wealth fraction, for exponential utility the amount.
struct PolicySearch {
  double lo = -10.0;
  double hi = 10.0;
  double tolerance = 1e-7;
};

/// Asset values are in discounted units. The wealth axis is log-uniform for
/// power utility and uniform for exponential utility; the asset axis is
/// always log-uniform.
struct LatticeSpec {
  int n_steps = 10;
  double maturity = 1.0;
  GridAxis wealth;
  GridAxis asset;
  PolicySearch policy;

  /// Asset axis around `s0` whose spacing divides sigma sqrt(dt), so that the
  /// diffusion branches land on nodes. `half_width` is measured in standard
  /// deviations of log s over the horizon; the lower end is widened by
  /// `extra_down` in log units to make room for downward jumps.
  static GridAxis aligned_asset_axis(const MarketParams& market, double s0, int n_steps,
                                     double maturity, int refinement = 2,
                                     double half_width = 5.0, double extra_down = 1.0);
};

void validate_lattice(const LatticeSpec& lattice, const UtilitySpec& utility);

/// Terminal liability: `quantity` claims sold.
struct LatticeClaim {
  ClaimSpec claim;
  double quantity = 0.0;
};

/// Expected utility on the (wealth x asset) lattice, with the optimal
/// strategy found per node.
struct LatticeSurface {
  UtilitySpec utility;
  bool marginal = false;  // true for E[U'(X_T)] surfaces
  Eigen::VectorXd wealth;
  Eigen::VectorXd asset;
  Eigen::VectorXd times;
  std::vector<Eigen::MatrixXd> values;  // one (wealth x asset) matrix per time level
  std::vector<Eigen::MatrixXd> policy;  // one per step, policy[k] acts on [t_k, t_k+1)

  /// Bilinear read-out in wealth and log s, carried out on the certainty
  /// equivalent (or its marginal analogue) and mapped back.
  double value_at(double x, double s, int level = 0) const;
};

/// One-period outcome of the discretized dynamics.
struct Branch {
  double probability;
  double asset_factor;  // S_{t+dt} / S_t
};

/// Two diffusion points e^{+-sigma sqrt(dt)} with the up-probability chosen
/// so that the no-jump return has mean e^{mu dt}, combined with at most one
/// jump per step (atom i with probability intensity_i dt, scaled down if the
/// total exceeds 0.9).
std::vector<Branch> lattice_branches(const MarketParams& market, double dt);

LatticeSurface lattice_expected_utility(const MarketParams& market, const UtilitySpec& utility,
                                        const LatticeSpec& lattice,
                                        const std::optional<LatticeClaim>& claim = std::nullopt);

/// Propagates U'(X_T) backwards with the policy stored in `surface`.
LatticeSurface lattice_marginal_utility(const MarketParams& market, const LatticeSpec& lattice,
                                        const LatticeSurface& surface);

/// Solves u(x0, s0) = sup E[U(X_T - eps C) | X_0 = x0 + eps v] for v by
/// bisection to 1e-10 * reference price.
double lattice_indifference_price(const MarketParams& market, const UtilitySpec& utility,
                                  const ClaimSpec& claim, double epsilon,
                                  const LatticeSpec& lattice, double x0, double s0);

struct IndifferenceLadder {
  std::vector<double> epsilons;
  std::vector<double> prices;
  /// Richardson limit eps -> 0 from the halving ladder.
  double extrapolated = 0.0;
};

/// Indifference prices for eps in {0.2, 0.1, 0.05} * x0 / reference price.
IndifferenceLadder lattice_indifference_ladder(const MarketParams& market,
                                               const UtilitySpec& utility,
                                               const ClaimSpec& claim,
                                               const LatticeSpec& lattice, double x0, double s0);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct McSpec {
  std::uint64_t n_paths = 100000;
  int n_steps = 50;
  std::uint64_t seed = 20100101;
  bool antithetic = true;
  /// Paths are simulated in this many batches (concurrently). The estimate
  /// does not depend on it.
  int n_batches = 1;
  /// Positive constant multiplying U. It cancels in the ratio.
  double utility_scale = 1.0;
};

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t blowups = 0;
};

/// sum w_i C_i / sum w_i with delta-method standard error. Consecutive
/// groups of `group` samples (antithetic pairs) are averaged first.
McEstimate ratio_estimate(std::span<const double> weights, std::span<const double> payoffs,
                          int group = 1);

/// E[U'(X_T) C(S_T)] / E[U'(X_T)] under the real-world measure, with X
/// following the optimal strategy from the invest module.
McEstimate mc_marginal_price(const MarketParams& market, const UtilitySpec& utility,
                             const ClaimSpec& claim, const McSpec& mc, double s0);

}  // namespace jumpdrift
