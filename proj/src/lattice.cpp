#include "jumpdrift/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roots.hpp"

namespace jumpdrift {

namespace {

bool is_power(const UtilitySpec& utility) { return std::holds_alternative<PowerUtility>(utility); }

// Surfaces are interpolated in a lifted coordinate that is affine in wealth
// for every supported utility, with or without a cash liability: the
// certainty equivalent U^{-1}(v) for value surfaces, (U')^{-1}(w) for
// marginal ones. Linear interpolation in U itself biases cash claims.
double lift(const UtilitySpec& utility, bool marginal, double v) {
  if (const auto* p = std::get_if<PowerUtility>(&utility)) {
    if (marginal) return std::pow(v, -1.0 / p->beta);
    if (p->beta == 1.0) return std::exp(v);
    return std::pow((1.0 - p->beta) * v, 1.0 / (1.0 - p->beta));
  }
  const double alpha = std::get<ExponentialUtility>(utility).alpha;
  return marginal ? -std::log(v / alpha) / alpha : -std::log(-v) / alpha;
}

double unlift(const UtilitySpec& utility, bool marginal, double x) {
  if (const auto* p = std::get_if<PowerUtility>(&utility); p && !(x > 0.0)) {
    if (marginal) return std::numeric_limits<double>::infinity();
    return p->beta < 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return marginal ? marginal_utility(utility, x) : utility_value(utility, x);
}

Eigen::VectorXd make_wealth_axis(const GridAxis& axis, const UtilitySpec& utility) {
  if (is_power(utility))
    return Eigen::VectorXd::LinSpaced(axis.nodes, std::log(axis.lo), std::log(axis.hi))
        .array()
        .exp()
        .matrix();
  return Eigen::VectorXd::LinSpaced(axis.nodes, axis.lo, axis.hi);
}

// Position of a wealth value on the axis: left node and the weight of the
// right node, linear in wealth. Weights outside [0, 1] extrapolate along the
// end segments.
struct WealthLocator {
  const Eigen::VectorXd& wealth;
  bool log_axis;
  double origin;
  double step;

  WealthLocator(const Eigen::VectorXd& w, const UtilitySpec& u)
      : wealth(w), log_axis(is_power(u)) {
    const Eigen::Index n = w.size();
    origin = log_axis ? std::log(w[0]) : w[0];
    step = ((log_axis ? std::log(w[n - 1]) : w[n - 1]) - origin) / static_cast<double>(n - 1);
  }

  std::pair<Eigen::Index, double> locate(double x) const {
    const Eigen::Index n = wealth.size();
    const double f = ((log_axis ? std::log(std::max(x, 1e-300)) : x) - origin) / step;
    const Eigen::Index left =
        std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(f)), 0, n - 2);
    return {left, (x - wealth[left]) / (wealth[left + 1] - wealth[left])};
  }
};

struct AssetLocator {
  Eigen::Index left;
  double weight;
};

AssetLocator locate_asset(const Eigen::VectorXd& log_asset, double log_s) {
  const Eigen::Index n = log_asset.size();
  const double h = (log_asset[n - 1] - log_asset[0]) / static_cast<double>(n - 1);
  const double f = std::clamp((log_s - log_asset[0]) / h, 0.0, static_cast<double>(n - 1));
  const Eigen::Index left = std::min<Eigen::Index>(static_cast<Eigen::Index>(f), n - 2);
  double w = f - static_cast<double>(left);
  if (w < 1e-10) w = 0.0;
  if (w > 1.0 - 1e-10) w = 1.0;
  return {left, w};
}

double payoff_discounted(const ClaimSpec& claim, double rate, double s_discounted) {
  const double growth = std::exp(rate * claim.maturity);
  return claim(s_discounted * growth) / growth;
}

// Shared backward-induction machinery.
class Induction {
 public:
  Induction(const MarketParams& market, const UtilitySpec& utility, const LatticeSpec& lattice,
            bool marginal)
      : utility_(utility),
        marginal_(marginal),
        dt_(lattice.maturity / lattice.n_steps),
        branches_(lattice_branches(market, dt_)) {
    surface_.utility = utility;
    surface_.marginal = marginal;
    surface_.wealth = make_wealth_axis(lattice.wealth, utility);
    surface_.asset = Eigen::VectorXd::LinSpaced(lattice.asset.nodes, std::log(lattice.asset.lo),
                                                std::log(lattice.asset.hi))
                         .array()
                         .exp()
                         .matrix();
    surface_.times = Eigen::VectorXd::LinSpaced(lattice.n_steps + 1, 0.0, lattice.maturity);
    surface_.values.resize(lattice.n_steps + 1);
    log_asset_ = surface_.asset.array().log().matrix();

    const Eigen::Index n_s = surface_.asset.size();
    targets_.resize(static_cast<std::size_t>(n_s));
    for (Eigen::Index b = 0; b < n_s; ++b)
      for (const auto& br : branches_)
        targets_[static_cast<std::size_t>(b)].push_back(
            locate_asset(log_asset_, log_asset_[b] + std::log(br.asset_factor)));

    r_min_ = 0.0;
    r_max_ = 0.0;
    for (const auto& br : branches_) {
      r_min_ = std::min(r_min_, br.asset_factor - 1.0);
      r_max_ = std::max(r_max_, br.asset_factor - 1.0);
    }
  }

  LatticeSurface& surface() { return surface_; }
  double dt() const { return dt_; }

  // Bracket of admissible strategies at wealth x.
  std::pair<double, double> bracket(const PolicySearch& policy) const {
    if (!is_power(utility_)) return {policy.lo, policy.hi};
    double lo = policy.lo, hi = policy.hi;
    const double margin = 1e-6;
    if (r_max_ > 0.0) lo = std::max(lo, -(1.0 - margin) / r_max_);
    if (r_min_ < 0.0) hi = std::min(hi, -(1.0 - margin) / r_min_);
    return {lo, std::max(lo, hi)};
  }

  double next_wealth(double x, double strategy, double asset_factor) const {
    return is_power(utility_) ? x * (1.0 + strategy * (asset_factor - 1.0))
                              : x + strategy * (asset_factor - 1.0);
  }

  // Expected next-level value at node (x, asset index b) under `strategy`.
  Eigen::MatrixXd lifted(const Eigen::MatrixXd& m) const {
    return m.unaryExpr([&](double v) { return lift(utility_, marginal_, v); });
  }

  // `next` holds a lifted level.
  double expectation(const Eigen::MatrixXd& next, const WealthLocator& wl, double x,
                     Eigen::Index b, double strategy) const {
    double total = 0.0;
    const auto& tg = targets_[static_cast<std::size_t>(b)];
    for (std::size_t k = 0; k < branches_.size(); ++k) {
      const auto [a, wx] = wl.locate(next_wealth(x, strategy, branches_[k].asset_factor));
      const auto& t = tg[k];
      const auto at_asset = [&](Eigen::Index col) {
        return next(a, col) + wx * (next(a + 1, col) - next(a, col));
      };
      double v = at_asset(t.left);
      if (t.weight > 0.0) v += t.weight * (at_asset(t.left + 1) - v);
      total += branches_[k].probability * unlift(utility_, marginal_, v);
    }
    return total;
  }

 private:
  UtilitySpec utility_;
  bool marginal_;
  double dt_;
  std::vector<Branch> branches_;
  LatticeSurface surface_;
  Eigen::VectorXd log_asset_;
  std::vector<std::vector<AssetLocator>> targets_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
};

}  // namespace

GridAxis LatticeSpec::aligned_asset_axis(const MarketParams& market, double s0, int n_steps,
                                         double maturity, int refinement, double half_width,
                                         double extra_down) {
  const double h = market.sigma * std::sqrt(maturity / n_steps) / refinement;
  const double spread = half_width * market.sigma * std::sqrt(maturity);
  const double n_up = std::ceil(spread / h);
  const double n_down = std::ceil((spread + extra_down) / h);
  return {s0 * std::exp(-n_down * h), s0 * std::exp(n_up * h),
          static_cast<int>(n_down + n_up) + 1};
}

void validate_lattice(const LatticeSpec& lattice, const UtilitySpec& utility) {
  if (lattice.n_steps < 1 || lattice.n_steps > 20)
    throw ValidationError("lattice needs 1 to 20 time steps");
  if (!(lattice.maturity > 0.0)) throw ValidationError("lattice maturity must be positive");
  if (lattice.wealth.nodes < 3 || lattice.asset.nodes < 3)
    throw ValidationError("lattice axes need at least 3 nodes");
  if (!(lattice.wealth.hi > lattice.wealth.lo) || !(lattice.asset.hi > lattice.asset.lo) ||
      !(lattice.asset.lo > 0.0))
    throw ValidationError("lattice axes need lo < hi and positive asset bounds");
  if (is_power(utility) && !(lattice.wealth.lo > 0.0))
    throw ValidationError("power utility needs a strictly positive wealth axis");
  if (!(lattice.policy.hi >= lattice.policy.lo) || !(lattice.policy.tolerance > 0.0))
    throw ValidationError("policy search needs lo <= hi and a positive tolerance");
}

std::vector<Branch> lattice_branches(const MarketParams& market, double dt) {
  const double h = market.sigma * std::sqrt(dt);
  const double up = std::exp(h);
  const double down = std::exp(-h);
  const double p_up = (std::exp(market.mu * dt) - down) / (up - down);
  if (!(p_up > 0.0 && p_up < 1.0))
    throw LatticeError("two-point diffusion probabilities leave [0, 1]; use more steps");

  double total = 0.0;
  for (const auto& atom : market.jumps.atoms()) total += atom.intensity * dt;
  const double thin = total > 0.9 ? 0.9 / total : 1.0;

  std::vector<Branch> branches;
  const double p_none = 1.0 - thin * total;
  branches.push_back({p_none * p_up, up});
  branches.push_back({p_none * (1.0 - p_up), down});
  for (const auto& atom : market.jumps.atoms()) {
    const double p = thin * atom.intensity * dt;
    const double jump = std::exp(atom.z);
    branches.push_back({p * p_up, up * jump});
    branches.push_back({p * (1.0 - p_up), down * jump});
  }
  return branches;
}

double LatticeSurface::value_at(double x, double s, int level) const {
  const Eigen::MatrixXd& m = values.at(static_cast<std::size_t>(level));
  const WealthLocator wl(wealth, utility);
  const auto [a, wx] = wl.locate(x);
  const Eigen::VectorXd log_asset = asset.array().log().matrix();
  const AssetLocator t = locate_asset(log_asset, std::log(s));
  const auto at_asset = [&](Eigen::Index col) {
    const double left = lift(utility, marginal, m(a, col));
    return left + wx * (lift(utility, marginal, m(a + 1, col)) - left);
  };
  double v = at_asset(t.left);
  if (t.weight > 0.0) v += t.weight * (at_asset(t.left + 1) - v);
  return unlift(utility, marginal, v);
}

LatticeSurface lattice_expected_utility(const MarketParams& market, const UtilitySpec& utility,
                                        const LatticeSpec& lattice,
                                        const std::optional<LatticeClaim>& claim) {
  validate_market(market);
  validate_utility(utility);
  validate_lattice(lattice, utility);
  if (claim) validate_claim(claim->claim);

  Induction ind(market, utility, lattice, false);
  LatticeSurface& surf = ind.surface();
  const Eigen::Index n_x = surf.wealth.size();
  const Eigen::Index n_s = surf.asset.size();

  Eigen::MatrixXd terminal(n_x, n_s);
  for (Eigen::Index b = 0; b < n_s; ++b) {
    const double liability =
        claim ? claim->quantity * payoff_discounted(claim->claim, market.rate, surf.asset[b]) : 0.0;
    for (Eigen::Index a = 0; a < n_x; ++a) {
      const double net = surf.wealth[a] - liability;
      if (is_power(utility) && !(net > 0.0))
        throw LatticeError("wealth grid underflow: terminal wealth net of the claim is "
                           "nonpositive at x=" + std::to_string(surf.wealth[a]));
      terminal(a, b) = utility_value(utility, net);
    }
  }
  surf.values.back() = std::move(terminal);
  surf.policy.assign(static_cast<std::size_t>(lattice.n_steps), Eigen::MatrixXd(n_x, n_s));

  const WealthLocator wl(surf.wealth, utility);
  for (int k = lattice.n_steps - 1; k >= 0; --k) {
    const Eigen::MatrixXd next = ind.lifted(surf.values[static_cast<std::size_t>(k + 1)]);
    Eigen::MatrixXd current(n_x, n_s);
    Eigen::MatrixXd& policy = surf.policy[static_cast<std::size_t>(k)];
    for (Eigen::Index a = 0; a < n_x; ++a) {
      const double x = surf.wealth[a];
      const auto [lo, hi] = ind.bracket(lattice.policy);
      for (Eigen::Index b = 0; b < n_s; ++b) {
        const auto objective = [&](double strategy) {
          return ind.expectation(next, wl, x, b, strategy);
        };
        const auto [best, value] =
            detail::golden_section_max(objective, lo, hi, lattice.policy.tolerance);
        current(a, b) = value;
        policy(a, b) = best;
      }
    }
    surf.values[static_cast<std::size_t>(k)] = std::move(current);
  }
  return std::move(surf);
}

LatticeSurface lattice_marginal_utility(const MarketParams& market, const LatticeSpec& lattice,
                                        const LatticeSurface& surface) {
  validate_market(market);
  validate_lattice(lattice, surface.utility);
  Induction ind(market, surface.utility, lattice, true);
  LatticeSurface& surf = ind.surface();
  const Eigen::Index n_x = surf.wealth.size();
  const Eigen::Index n_s = surf.asset.size();
  if (surface.policy.size() != static_cast<std::size_t>(lattice.n_steps) ||
      surface.wealth.size() != n_x || surface.asset.size() != n_s)
    throw ValidationError("policy surface does not match the lattice");

  Eigen::MatrixXd terminal(n_x, n_s);
  for (Eigen::Index a = 0; a < n_x; ++a)
    terminal.row(a).setConstant(marginal_utility(surf.utility, surf.wealth[a]));
  surf.values.back() = std::move(terminal);
  surf.policy = surface.policy;

  const WealthLocator wl(surf.wealth, surf.utility);
  for (int k = lattice.n_steps - 1; k >= 0; --k) {
    const Eigen::MatrixXd next = ind.lifted(surf.values[static_cast<std::size_t>(k + 1)]);
    const Eigen::MatrixXd& policy = surf.policy[static_cast<std::size_t>(k)];
    Eigen::MatrixXd current(n_x, n_s);
    for (Eigen::Index a = 0; a < n_x; ++a)
      for (Eigen::Index b = 0; b < n_s; ++b)
        current(a, b) = ind.expectation(next, wl, surf.wealth[a], b, policy(a, b));
    surf.values[static_cast<std::size_t>(k)] = std::move(current);
  }
  return std::move(surf);
}

namespace {

double solve_indifference(const LatticeSurface& with_claim, double target, double epsilon,
                          const ClaimSpec& claim, const LatticeSurface& reference, double rate,
                          double x0, double s0) {
  double pay_lo = std::numeric_limits<double>::infinity();
  double pay_hi = -pay_lo;
  for (Eigen::Index b = 0; b < reference.asset.size(); ++b) {
    const double c = payoff_discounted(claim, rate, reference.asset[b]);
    pay_lo = std::min(pay_lo, c);
    pay_hi = std::max(pay_hi, c);
  }
  const double scale = claim.reference_price();
  double lo = pay_lo - 0.05 * scale;
  double hi = pay_hi + 0.05 * scale;
  const auto gap = [&](double v) { return with_claim.value_at(x0 + epsilon * v, s0) - target; };
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (g_lo > 0.0 || g_hi < 0.0)
    throw NoBracket("indifference equation has no sign change on the payoff range");
  while (hi - lo > 1e-10 * scale) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if (g < 0.0) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lattice_indifference_price(const MarketParams& market, const UtilitySpec& utility,
                                  const ClaimSpec& claim, double epsilon,
                                  const LatticeSpec& lattice, double x0, double s0) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const LatticeSurface base = lattice_expected_utility(market, utility, lattice);
  const LatticeSurface with_claim =
      lattice_expected_utility(market, utility, lattice, LatticeClaim{claim, epsilon});
  return solve_indifference(with_claim, base.value_at(x0, s0), epsilon, claim, base,
                            market.rate, x0, s0);
}

IndifferenceLadder lattice_indifference_ladder(const MarketParams& market,
                                               const UtilitySpec& utility,
                                               const ClaimSpec& claim,
                                               const LatticeSpec& lattice, double x0, double s0) {
  const LatticeSurface base = lattice_expected_utility(market, utility, lattice);
  const double target = base.value_at(x0, s0);
  IndifferenceLadder ladder;
  for (const double c : {0.2, 0.1, 0.05}) {
    const double eps = c * x0 / claim.reference_price();
    const LatticeSurface with_claim =
        lattice_expected_utility(market, utility, lattice, LatticeClaim{claim, eps});
    ladder.epsilons.push_back(eps);
    ladder.prices.push_back(
        solve_indifference(with_claim, target, eps, claim, base, market.rate, x0, s0));
  }
  const auto& v = ladder.prices;
  ladder.extrapolated = (8.0 * v[2] - 6.0 * v[1] + v[0]) / 3.0;
  return ladder;
}

}  // namespace jumpdrift
