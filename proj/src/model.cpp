#include "jumpdrift/model.hpp"

#include <algorithm>
#include <string>

namespace jumpdrift {

double JumpMeasure::total_intensity() const {
  double total = 0.0;
  for (const auto& atom : atoms_) total += atom.intensity;
  return total;
}

Eigen::VectorXd JumpMeasure::relative_sizes() const {
  Eigen::VectorXd out(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) out[i] = atoms_[i].relative_size();
  return out;
}

Eigen::VectorXd JumpMeasure::intensities() const {
  Eigen::VectorXd out(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) out[i] = atoms_[i].intensity;
  return out;
}

JumpMeasure JumpMeasure::scaled(double factor) const {
  auto atoms = atoms_;
  for (auto& atom : atoms) atom.intensity *= factor;
  return JumpMeasure(std::move(atoms));
}

double MarketParams::average_drift() const { return mu + jump_moment(jumps, 1); }

MarketParams MarketParams::with_average_drift(double mu_tilde) const {
  MarketParams out = *this;
  out.mu = mu_tilde - jump_moment(jumps, 1);
  return out;
}

MarketParams validate_market(const MarketParams& params) {
  if (!std::isfinite(params.mu)) throw ValidationError("mu must be finite");
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
    throw ValidationError("sigma must be positive");
  if (!std::isfinite(params.rate)) throw ValidationError("rate must be finite");
  for (const auto& atom : params.jumps.atoms()) {
    if (!std::isfinite(atom.z)) throw ValidationError("jump atom z must be finite");
    if (atom.relative_size() == 0.0) throw ValidationError("jump atom z=0");
    if (!(atom.intensity > 0.0) || !std::isfinite(atom.intensity))
      throw ValidationError("jump atom intensity must be positive");
  }
  return params;
}

double jump_moment(const JumpMeasure& jumps, int k, std::span<const double> weights) {
  if (k < 1) throw ValidationError("jump moment order must be >= 1");
  if (!weights.empty() && weights.size() != jumps.size())
    throw ValidationError("jump moment weights: length " + std::to_string(weights.size()) +
                          " does not match " + std::to_string(jumps.size()) + " atoms");
  double sum = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sum += w * std::pow(jumps[i].relative_size(), k) * jumps[i].intensity;
  }
  return sum;
}

void validate_utility(const UtilitySpec& utility) {
  if (const auto* p = std::get_if<PowerUtility>(&utility)) {
    if (!(p->beta >= 1.0) || !std::isfinite(p->beta))
      throw ValidationError("power utility requires beta >= 1");
  } else {
    const double alpha = std::get<ExponentialUtility>(utility).alpha;
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw ValidationError("exponential utility requires alpha > 0");
  }
}

double utility_value(const UtilitySpec& utility, double wealth) {
  if (const auto* p = std::get_if<PowerUtility>(&utility)) {
    if (p->beta == 1.0) return std::log(wealth);
    return std::pow(wealth, 1.0 - p->beta) / (1.0 - p->beta);
  }
  return -std::exp(-std::get<ExponentialUtility>(utility).alpha * wealth);
}

double marginal_utility(const UtilitySpec& utility, double wealth) {
  if (const auto* p = std::get_if<PowerUtility>(&utility)) return std::pow(wealth, -p->beta);
  const double alpha = std::get<ExponentialUtility>(utility).alpha;
  return alpha * std::exp(-alpha * wealth);
}

namespace {

double interpolate_table(const CustomPayoff& table, double s) {
  const auto& xs = table.s;
  const auto& ys = table.payoff;
  if (xs.size() == 1) return ys.front();
  std::size_t hi = std::upper_bound(xs.begin(), xs.end(), s) - xs.begin();
  hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (s - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

AffineTail segment_tail(const CustomPayoff& table, std::size_t lo) {
  if (table.s.size() == 1) return {table.payoff.front(), 0.0};
  const double slope =
      (table.payoff[lo + 1] - table.payoff[lo]) / (table.s[lo + 1] - table.s[lo]);
  return {table.payoff[lo] - slope * table.s[lo], slope};
}

}  // namespace

double ClaimSpec::reference_price() const {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CustomPayoff>) {
          return std::sqrt(p.s.front() * p.s.back());
        } else {
          return p.strike;
        }
      },
      payoff);
}

double ClaimSpec::operator()(double s) const {
  return std::visit(
      [s](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Put>) {
          return std::max(p.strike - s, 0.0);
        } else if constexpr (std::is_same_v<T, Call>) {
          return std::max(s - p.strike, 0.0);
        } else {
          return interpolate_table(p, s);
        }
      },
      payoff);
}

Eigen::VectorXd ClaimSpec::operator()(const Eigen::VectorXd& s) const {
  return s.unaryExpr([this](double x) { return (*this)(x); });
}

AffineTail ClaimSpec::lower_tail() const {
  return std::visit(
      [](const auto& p) -> AffineTail {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Put>) {
          return {p.strike, -1.0};
        } else if constexpr (std::is_same_v<T, Call>) {
          return {0.0, 0.0};
        } else {
          return segment_tail(p, 0);
        }
      },
      payoff);
}

AffineTail ClaimSpec::upper_tail() const {
  return std::visit(
      [](const auto& p) -> AffineTail {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Put>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, Call>) {
          return {-p.strike, 1.0};
        } else {
          return segment_tail(p, p.s.size() < 2 ? 0 : p.s.size() - 2);
        }
      },
      payoff);
}

void validate_claim(const ClaimSpec& claim) {
  if (!(claim.maturity > 0.0) || !std::isfinite(claim.maturity))
    throw ValidationError("claim maturity must be positive");
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CustomPayoff>) {
          if (p.s.empty() || p.s.size() != p.payoff.size())
            throw ValidationError("custom payoff table needs matching, nonempty columns");
          for (std::size_t i = 0; i < p.s.size(); ++i) {
            if (!(p.s[i] > 0.0) || !std::isfinite(p.payoff[i]))
              throw ValidationError("custom payoff table needs s > 0 and finite payoffs");
            if (i > 0 && !(p.s[i] > p.s[i - 1]))
              throw ValidationError("custom payoff table must be strictly increasing in s");
          }
        } else {
          if (!(p.strike > 0.0) || !std::isfinite(p.strike))
            throw ValidationError("strike must be positive");
        }
      },
      claim.payoff);
}

}  // namespace jumpdrift
