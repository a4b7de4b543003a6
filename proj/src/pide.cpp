#include "jumpdrift/pide.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "jumpdrift/csv.hpp"
#include "jumpdrift/series.hpp"

namespace jumpdrift {

namespace {

// Factorized tridiagonal system (I - theta dt A) restricted to interior nodes.
class TridiagonalSolver {
 public:
  TridiagonalSolver(Eigen::Index n, double lower, double diag, double upper)
      : lower_(lower), c_prime_(n), denom_(n) {
    double prev = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      denom_[i] = diag - (i > 0 ? lower * prev : 0.0);
      prev = upper / denom_[i];
      c_prime_[i] = prev;
    }
  }

  void solve(Eigen::Ref<Eigen::VectorXd> rhs) const {
    const Eigen::Index n = rhs.size();
    rhs[0] /= denom_[0];
    for (Eigen::Index i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_ * rhs[i - 1]) / denom_[i];
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= c_prime_[i] * rhs[i + 1];
  }

 private:
  double lower_;
  Eigen::VectorXd c_prime_;
  Eigen::VectorXd denom_;
};

// Where the image e^{z_i} s_j of an interior node lands.
struct JumpStencil {
  std::vector<Eigen::Index> left;   // -1 when outside the grid
  std::vector<double> weight;       // weight of left + 1
  std::vector<double> image_price;  // used when outside
};

class PideStepper {
 public:
  PideStepper(const PideSolution& sol, const MarketParams& market) : sol_(sol) {
    const Eigen::Index n = sol.log_s.size();
    const double h = sol.spacing();
    const double s2 = market.sigma * market.sigma;
    const double drift = market.rate + sol.measure.drift_q - 0.5 * s2;
    a_ = 0.5 * s2 / (h * h) - drift / (2.0 * h);
    c_ = 0.5 * s2 / (h * h) + drift / (2.0 * h);
    b_ = -s2 / (h * h) - market.rate;

    const Eigen::Index n_atoms = sol.log_jumps.size();
    stencils_.resize(n_atoms);
    for (Eigen::Index i = 0; i < n_atoms; ++i) {
      auto& st = stencils_[i];
      st.left.assign(n, -1);
      st.weight.assign(n, 0.0);
      st.image_price.assign(n, 0.0);
      for (Eigen::Index j = 1; j + 1 < n; ++j) {
        const double f = (sol.log_s[j] + sol.log_jumps[i] - sol.log_s[0]) / h;
        st.image_price[j] = std::exp(sol.log_s[j] + sol.log_jumps[i]);
        if (f < -1e-9 || f > static_cast<double>(n - 1) + 1e-9) {
          if (!sol.grid.extrapolate)
            throw GridError("jump image " + std::to_string(st.image_price[j]) +
                            " of node " + std::to_string(sol.s[j]) +
                            " lies outside the grid and extrapolation is disabled");
          continue;
        }
        const double fc = std::clamp(f, 0.0, static_cast<double>(n - 1));
        Eigen::Index left = std::min<Eigen::Index>(static_cast<Eigen::Index>(fc), n - 2);
        st.left[j] = left;
        st.weight[j] = fc - static_cast<double>(left);
      }
    }
  }

  // A v on interior nodes (boundary entries left at zero).
  Eigen::VectorXd apply_diffusion(const Eigen::VectorXd& v) const {
    const Eigen::Index n = v.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    out.segment(1, n - 2) = a_ * v.head(n - 2) + b_ * v.segment(1, n - 2) + c_ * v.tail(n - 2);
    return out;
  }

  // sum_i lbar_i (v(e^{z_i} s) - v(s)) on interior nodes, at time t.
  Eigen::VectorXd apply_jumps(const Eigen::VectorXd& v, double t) const {
    const Eigen::Index n = v.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < stencils_.size(); ++i) {
      const double lbar = sol_.measure.adjusted_intensities[static_cast<Eigen::Index>(i)];
      const auto& st = stencils_[i];
      for (Eigen::Index j = 1; j + 1 < n; ++j) {
        const double image = st.left[j] >= 0
                                 ? (1.0 - st.weight[j]) * v[st.left[j]] +
                                       st.weight[j] * v[st.left[j] + 1]
                                 : sol_.asymptote(st.image_price[j], t);
        out[j] += lbar * (image - v[j]);
      }
    }
    return out;
  }

  // One theta-step from time t_from to t_to = t_from - dt.
  Eigen::VectorXd step(const Eigen::VectorXd& v, double t_from, double dt, double theta) const {
    const Eigen::Index n = v.size();
    const double t_to = t_from - dt;
    Eigen::VectorXd base = v;
    if (theta < 1.0)
      base += (1.0 - theta) * dt * (apply_diffusion(v) + apply_jumps(v, t_from));

    const TridiagonalSolver solver(n - 2, -theta * dt * a_, 1.0 - theta * dt * b_,
                                   -theta * dt * c_);
    Eigen::VectorXd next = v;
    next[0] = sol_.asymptote(sol_.s[0], t_to);
    next[n - 1] = sol_.asymptote(sol_.s[n - 1], t_to);

    const bool has_jumps = !stencils_.empty();
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    for (int iter = 0; iter < 200; ++iter) {
      Eigen::VectorXd rhs = base;
      if (has_jumps) rhs += theta * dt * apply_jumps(next, t_to);
      Eigen::VectorXd interior = rhs.segment(1, n - 2);
      interior[0] += theta * dt * a_ * next[0];
      interior[n - 3] += theta * dt * c_ * next[n - 1];
      solver.solve(interior);
      const double change = (interior - next.segment(1, n - 2)).cwiseAbs().maxCoeff();
      next.segment(1, n - 2) = interior;
      if (!has_jumps || change <= 1e-13 * scale) return next;
    }
    throw NumericalError("jump fixed-point iteration did not converge");
  }

 private:
  const PideSolution& sol_;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
  std::vector<JumpStencil> stencils_;
};

}  // namespace

void validate_grid(const GridSpec& grid) {
  if (!(grid.s_min > 0.0) || !(grid.s_max > grid.s_min))
    throw ValidationError("grid needs 0 < s_min < s_max");
  if (grid.n_space < 16) throw ValidationError("grid needs n_space >= 16");
  if (grid.n_time < 8) throw ValidationError("grid needs n_time >= 8");
  if (grid.rannacher_steps < 0) throw ValidationError("rannacher_steps must be >= 0");
  if (!(grid.max_jump_rate_dt > 0.0)) throw ValidationError("max_jump_rate_dt must be > 0");
}

GridSpec default_grid(const ClaimSpec& claim, const MarketParams& market, int n_space,
                      int n_time) {
  const double centre = claim.reference_price();
  double down = std::log(8.0);
  double up = std::log(8.0);
  double z_ref = 0.0;
  double strongest = 0.0;
  for (const auto& atom : market.jumps.atoms()) {
    if (atom.z < 0.0) down = std::max(down, std::log(8.0) - atom.z);
    if (atom.z > 0.0) up = std::max(up, std::log(8.0) + atom.z);
    if (atom.intensity > strongest) {
      strongest = atom.intensity;
      z_ref = std::abs(atom.z);
    }
  }
  double h = (down + up) / std::max(n_space - 1, 1);
  if (z_ref > 0.0) h = z_ref / std::ceil(z_ref / h);
  const double n_down = std::ceil(down / h - 1e-9);
  const double n_up = std::ceil(up / h - 1e-9);

  GridSpec grid;
  grid.s_min = centre * std::exp(-n_down * h);
  grid.s_max = centre * std::exp(n_up * h);
  grid.n_space = static_cast<int>(n_down + n_up) + 1;
  grid.n_time = std::max(8, static_cast<int>(std::ceil(n_time * claim.maturity - 1e-9)));
  return grid;
}

Eigen::VectorXd PideSolution::at_time(double t) const {
  const Eigen::Index last = times.size() - 1;
  if (t < -1e-12 || t > maturity + 1e-12)
    throw ValidationError("time " + std::to_string(t) + " outside [0, maturity]");
  const double dt = maturity / static_cast<double>(last);
  const double f = std::clamp(t / dt, 0.0, static_cast<double>(last));
  const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(f), last - 1);
  const double w = f - static_cast<double>(k);
  if (w < 1e-12) return values.row(k).transpose();
  if (w > 1.0 - 1e-12) return values.row(k + 1).transpose();
  return ((1.0 - w) * values.row(k) + w * values.row(k + 1)).transpose();
}

double PideSolution::asymptote(double price, double t) const {
  const double tau = maturity - t;
  const double centre = 0.5 * (log_s[0] + log_s[log_s.size() - 1]);
  const AffineTail& tail = std::log(price) < centre ? lower_tail : upper_tail;
  const double v = tail.discounted(price, rate, tau);
  return floor_tails_at_zero ? std::max(v, 0.0) : v;
}

double PideSolution::value_at(const Eigen::VectorXd& row, double price, double t) const {
  const Eigen::Index n = log_s.size();
  const double f = (std::log(price) - log_s[0]) / spacing();
  if (f < -1e-9 || f > static_cast<double>(n - 1) + 1e-9) {
    if (!grid.extrapolate)
      throw GridError("price " + std::to_string(price) + " outside the solution grid");
    return asymptote(price, t);
  }
  const double fc = std::clamp(f, 0.0, static_cast<double>(n - 1));
  const Eigen::Index left = std::min<Eigen::Index>(static_cast<Eigen::Index>(fc), n - 2);
  const double w = fc - static_cast<double>(left);
  return (1.0 - w) * row[left] + w * row[left + 1];
}

PideSolution solve_pide(const PricingMeasure& measure, const ClaimSpec& claim,
                        const MarketParams& market, const GridSpec& grid, std::string label) {
  validate_market(market);
  validate_claim(claim);
  validate_grid(grid);
  if (measure.adjusted_intensities.size() != static_cast<Eigen::Index>(market.jumps.size()))
    throw ValidationError("pricing measure does not match the market's jump atoms");

  PideSolution sol;
  sol.grid = grid;
  sol.label = std::move(label);
  sol.measure = measure;
  sol.rate = market.rate;
  sol.maturity = claim.maturity;
  sol.lower_tail = claim.lower_tail();
  sol.upper_tail = claim.upper_tail();
  sol.floor_tails_at_zero = claim.is_vanilla();
  sol.log_s = Eigen::VectorXd::LinSpaced(grid.n_space, std::log(grid.s_min), std::log(grid.s_max));
  sol.s = sol.log_s.array().exp().matrix();
  sol.log_jumps.resize(static_cast<Eigen::Index>(market.jumps.size()));
  for (std::size_t i = 0; i < market.jumps.size(); ++i)
    sol.log_jumps[static_cast<Eigen::Index>(i)] = market.jumps[i].z;

  const double jump_rate = measure.adjusted_intensities.cwiseAbs().sum();
  int steps = grid.n_time;
  if (claim.maturity / steps * jump_rate > grid.max_jump_rate_dt)
    steps = static_cast<int>(std::ceil(claim.maturity * jump_rate / grid.max_jump_rate_dt));
  const double dt = claim.maturity / steps;
  sol.times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, claim.maturity);
  sol.values.resize(steps + 1, grid.n_space);

  Eigen::VectorXd v = claim(sol.s);
  sol.values.row(steps) = v.transpose();

  const PideStepper stepper(sol, market);
  for (int k = steps; k > 0; --k) {
    const double t_from = sol.times[k];
    if (steps - k < grid.rannacher_steps) {
      v = stepper.step(v, t_from, 0.5 * dt, 1.0);
      v = stepper.step(v, t_from - 0.5 * dt, 0.5 * dt, 1.0);
    } else {
      v = stepper.step(v, t_from, dt, 0.5);
    }
    if (!v.allFinite()) throw NumericalError("non-finite values in PIDE solution");
    sol.values.row(k - 1) = v.transpose();
  }

  if (grid.self_check) {
    GridSpec fine = grid;
    fine.n_space = 2 * grid.n_space - 1;
    fine.n_time = 2 * grid.n_time;
    fine.self_check = false;
    const PideSolution refined = solve_pide(measure, claim, market, fine, sol.label);
    const Eigen::Index n = grid.n_space;
    const double floor = 1e-4 * claim.reference_price();
    double worst = 0.0;
    for (Eigen::Index j = n / 3; j <= 2 * n / 3; ++j) {
      const double coarse = sol.values(0, j);
      const double diff = std::abs(refined.values(0, 2 * j) - coarse);
      worst = std::max(worst, diff / std::max(std::abs(coarse), floor));
    }
    sol.self_check_change = worst;
  }
  return sol;
}

void write_solution_csv(const PideSolution& solution, std::ostream& out) {
  CsvWriter csv(out, {"t", "s", "value"});
  for (Eigen::Index k = 0; k < solution.times.size(); ++k)
    for (Eigen::Index j = 0; j < solution.s.size(); ++j)
      csv.row({solution.times[k], solution.s[j], solution.values(k, j)});
}

PriceQuote price_claim(const MarketParams& market, const PricingMeasure& measure,
                       const ClaimSpec& claim, double s, const std::optional<GridSpec>& grid) {
  validate_market(market);
  validate_claim(claim);
  const bool single = market.jumps.size() <= 1;
  const double lbar = market.jumps.empty() ? 0.0 : measure.adjusted_intensities[0];
  if (!grid && claim.is_vanilla() && single && lbar >= 0.0) {
    const double z = market.jumps.empty() ? 0.0 : market.jumps[0].z;
    return {price_series_fixed_jump(lbar, z, market, claim, s, 0.0).value, PricingRoute::Series};
  }
  const GridSpec g = grid.value_or(default_grid(claim, market));
  const PideSolution sol = solve_pide(measure, claim, market, g);
  return {sol.value_at(s, 0.0), PricingRoute::Pide};
}

}  // namespace jumpdrift
