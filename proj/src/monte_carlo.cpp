#include "jumpdrift/oracle.hpp"

#include <cmath>
#include <future>
#include <random>

namespace jumpdrift {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct PathOutput {
  double weight = 0.0;
  double payoff = 0.0;
  bool blown_up = false;
};

// Simulates one path (or an antithetic pair sharing the jump counts) and
// returns U'(X_T) / U'(x) with the discounted payoff.
class PathSimulator {
 public:
  PathSimulator(const MarketParams& market, const UtilitySpec& utility, const ClaimSpec& claim,
                const McSpec& mc, double s0)
      : market_(market), claim_(claim), mc_(mc), s0_(s0) {
    dt_ = claim.maturity / mc.n_steps;
    sqrt_dt_ = std::sqrt(dt_);
    const OptimalInvestment inv = optimal_investment(market, utility);
    if (const auto* p = std::get_if<PowerUtility>(&utility)) {
      power_ = true;
      beta_ = p->beta;
      fraction_ = std::get<Fraction>(inv).pi_tilde;
    } else {
      exposure_ = std::get<Amount>(inv).pi_bar;
    }
    for (const auto& atom : market.jumps.atoms()) {
      jump_rates_.push_back(atom.intensity * dt_);
      const double rel = atom.relative_size();
      rel_sizes_.push_back(rel);
      log_wealth_jumps_.push_back(power_ ? std::log1p(fraction_ * rel) : 0.0);
    }
    growth_ = std::exp(market.rate * claim.maturity);
  }

  void simulate(std::uint64_t pair, PathOutput* out, int count) const {
    std::mt19937_64 rng(splitmix64(mc_.seed ^ splitmix64(pair)));
    std::normal_distribution<double> normal;
    const std::size_t n_atoms = jump_rates_.size();
    std::vector<std::poisson_distribution<int>> poisson;
    for (const double r : jump_rates_) poisson.emplace_back(r);

    const double sig = market_.sigma;
    double w_sum = 0.0;
    double log_s_jumps = 0.0;
    double wealth_jumps = 0.0;  // power: log-wealth jumps, exponential: sum of relative sizes
    bool blown = false;
    for (int step = 0; step < mc_.n_steps; ++step) {
      w_sum += normal(rng);
      for (std::size_t i = 0; i < n_atoms; ++i) {
        const int k = poisson[i](rng);
        if (k == 0) continue;
        log_s_jumps += k * market_.jumps[i].z;
        if (power_) {
          if (!(1.0 + fraction_ * rel_sizes_[i] > 0.0)) blown = true;
          else wealth_jumps += k * log_wealth_jumps_[i];
        } else {
          wealth_jumps += k * rel_sizes_[i];
        }
      }
    }
    const double T = claim_.maturity;
    const double w_t = w_sum * sqrt_dt_;
    for (int j = 0; j < count; ++j) {
      const double w = j == 0 ? w_t : -w_t;
      const double log_s = (market_.mu - 0.5 * sig * sig) * T + sig * w + log_s_jumps;
      PathOutput& o = out[j];
      o.payoff = claim_(s0_ * std::exp(log_s) * growth_) / growth_;
      o.blown_up = blown;
      double log_weight;
      if (power_) {
        const double log_x = (fraction_ * market_.mu - 0.5 * fraction_ * fraction_ * sig * sig) * T +
                             fraction_ * sig * w + wealth_jumps;
        log_weight = -beta_ * log_x;
      } else {
        log_weight = -exposure_ * (market_.mu * T + sig * w + wealth_jumps);
      }
      o.weight = mc_.utility_scale * std::exp(log_weight);
    }
  }

 private:
  const MarketParams& market_;
  const ClaimSpec& claim_;
  const McSpec& mc_;
  double s0_;
  double dt_ = 0.0;
  double sqrt_dt_ = 0.0;
  double growth_ = 1.0;
  bool power_ = false;
  double beta_ = 1.0;
  double fraction_ = 0.0;
  double exposure_ = 0.0;  // alpha times the amount held
  std::vector<double> jump_rates_;
  std::vector<double> rel_sizes_;
  std::vector<double> log_wealth_jumps_;
};

}  // namespace

McEstimate ratio_estimate(std::span<const double> weights, std::span<const double> payoffs,
                          int group) {
  if (weights.size() != payoffs.size()) throw ValidationError("weights and payoffs differ in size");
  if (group < 1 || weights.size() % static_cast<std::size_t>(group) != 0)
    throw ValidationError("sample count is not a multiple of the group size");
  const std::size_t n_groups = weights.size() / static_cast<std::size_t>(group);
  if (n_groups < 2) throw ValidationError("ratio estimate needs at least two groups");

  std::vector<double> y(n_groups), z(n_groups);
  double sum_y = 0.0, sum_z = 0.0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < group; ++j) {
      const std::size_t i = g * static_cast<std::size_t>(group) + static_cast<std::size_t>(j);
      a += weights[i] * payoffs[i];
      b += weights[i];
    }
    y[g] = a / group;
    z[g] = b / group;
    sum_y += y[g];
    sum_z += z[g];
  }
  if (!(sum_z > 0.0)) throw NumericalError("ratio estimate has a nonpositive denominator");
  const double ratio = sum_y / sum_z;
  const double n = static_cast<double>(n_groups);
  double ss = 0.0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const double d = y[g] - ratio * z[g];
    ss += d * d;
  }
  const double z_bar = sum_z / n;
  return {ratio, std::sqrt(ss / (n - 1.0) / n) / z_bar, 0};
}

McEstimate mc_marginal_price(const MarketParams& market, const UtilitySpec& utility,
                             const ClaimSpec& claim, const McSpec& mc, double s0) {
  validate_market(market);
  validate_utility(utility);
  validate_claim(claim);
  if (mc.n_paths < 4 || mc.n_steps < 1 || mc.n_batches < 1)
    throw ValidationError("Monte Carlo needs at least 4 paths, 1 step and 1 batch");
  if (mc.antithetic && mc.n_paths % 2 != 0)
    throw ValidationError("antithetic sampling needs an even path count");
  if (!(mc.utility_scale > 0.0)) throw ValidationError("utility scale must be positive");
  if (!(s0 > 0.0)) throw ValidationError("spot must be positive");

  const PathSimulator sim(market, utility, claim, mc, s0);
  const int group = mc.antithetic ? 2 : 1;
  const std::uint64_t n_units = mc.n_paths / static_cast<std::uint64_t>(group);
  std::vector<PathOutput> paths(mc.n_paths);

  const auto run = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t u = begin; u < end; ++u)
      sim.simulate(u, &paths[u * static_cast<std::uint64_t>(group)], group);
  };
  const auto n_batches = static_cast<std::uint64_t>(mc.n_batches);
  std::vector<std::future<void>> jobs;
  for (std::uint64_t b = 0; b < n_batches; ++b) {
    const std::uint64_t begin = n_units * b / n_batches;
    const std::uint64_t end = n_units * (b + 1) / n_batches;
    jobs.push_back(std::async(n_batches > 1 ? std::launch::async : std::launch::deferred, run,
                              begin, end));
  }
  for (auto& j : jobs) j.get();

  std::uint64_t blowups = 0;
  std::vector<double> weights, payoffs;
  weights.reserve(paths.size());
  payoffs.reserve(paths.size());
  for (std::uint64_t u = 0; u < n_units; ++u) {
    const PathOutput* p = &paths[u * static_cast<std::uint64_t>(group)];
    if (p->blown_up) {
      blowups += static_cast<std::uint64_t>(group);
      continue;
    }
    for (int j = 0; j < group; ++j) {
      weights.push_back(p[j].weight);
      payoffs.push_back(p[j].payoff);
    }
  }
  if (static_cast<double>(blowups) > 1e-3 * static_cast<double>(mc.n_paths))
    throw PathBlowup("wealth crossed zero on " + std::to_string(blowups) + " of " +
                     std::to_string(mc.n_paths) + " paths");
  McEstimate est = ratio_estimate(weights, payoffs, group);
  est.blowups = blowups;
  return est;
}

}  // namespace jumpdrift
