#include "jumpdrift/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "jumpdrift/csv.hpp"
#include "jumpdrift/errors.hpp"
#include "jumpdrift/invest.hpp"

namespace jumpdrift {

namespace {

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r");
  return std::string(v.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }
  double number(const std::string& text) const {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) fail("not a number: '" + text + "'");
    return v;
  }
  int integer(const std::string& text) const {
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) fail("not an integer: '" + text + "'");
    return v;
  }
  std::pair<double, double> pair(const std::string& text, char sep) const {
    const auto parts = split(text, sep);
    if (parts.size() != 2) fail("expected two values separated by '" + std::string(1, sep) + "'");
    return {number(parts[0]), number(parts[1])};
  }

 private:
  int line_;
};

struct ClaimFields {
  std::string kind = "put";
  std::optional<double> strike;
  double maturity = 1.0;
  CustomPayoff table;
};

struct UtilityFields {
  std::string kind = "power";
  std::optional<double> beta;
  std::optional<double> alpha;
};

}  // namespace

MethodName parse_method_name(const std::string& name) {
  if (name == "merton") return MethodName::Merton;
  if (name == "utility") return MethodName::Utility;
  if (name == "minvar") return MethodName::MinimalVariance;
  throw ConfigError("unknown method '" + name + "' (expected merton, utility or minvar)");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  ClaimFields claim;
  UtilityFields utility;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError at(line_no);
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::vector<std::string> known = {"market", "jumps",  "utility", "claim",
                                                     "method", "grid", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        at.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto unknown = [&] { at.fail("unknown key '" + key + "' in [" + section + "]"); };

    if (section == "market") {
      if (key == "mu") cfg.mu = at.number(value);
      else if (key == "mu_tilde") cfg.mu_tilde = at.number(value);
      else if (key == "sigma") cfg.sigma = at.number(value);
      else if (key == "rate") cfg.rate = at.number(value);
      else if (key == "spot") cfg.spot = at.number(value);
      else unknown();
    } else if (section == "jumps") {
      if (key == "atom") {
        const auto [z, nu] = at.pair(value, ',');
        cfg.atoms.push_back({z, nu});
      } else if (key == "atom_rel") {
        const auto [rel, nu] = at.pair(value, ',');
        if (!(rel > -1.0)) at.fail("relative jump size must exceed -1");
        cfg.atoms.push_back(JumpAtom::from_relative(rel, nu));
      } else {
        unknown();
      }
    } else if (section == "utility") {
      if (key == "kind") utility.kind = value;
      else if (key == "beta") utility.beta = at.number(value);
      else if (key == "alpha") utility.alpha = at.number(value);
      else unknown();
    } else if (section == "claim") {
      if (key == "kind") claim.kind = value;
      else if (key == "strike") claim.strike = at.number(value);
      else if (key == "maturity") claim.maturity = at.number(value);
      else if (key == "points") {
        for (const auto& point : split(value, ',')) {
          const auto [s, c] = at.pair(point, ':');
          claim.table.s.push_back(s);
          claim.table.payoff.push_back(c);
        }
      } else {
        unknown();
      }
    } else if (section == "method") {
      if (key == "name") {
        try {
          cfg.method = parse_method_name(value);
        } catch (const ConfigError& e) {
          at.fail(e.what());
        }
      } else if (key == "mode") {
        if (value == "drift-given") cfg.mode = DriftMode::DriftGiven;
        else if (value == "implied-drift") cfg.mode = DriftMode::ImpliedDrift;
        else at.fail("mode must be drift-given or implied-drift");
      } else if (key == "pi_star") {
        cfg.pi_star = at.number(value);
      } else {
        unknown();
      }
    } else if (section == "grid") {
      if (key == "s_min") cfg.grid.s_min = at.number(value);
      else if (key == "s_max") cfg.grid.s_max = at.number(value);
      else if (key == "n_space") cfg.grid.n_space = at.integer(value);
      else if (key == "n_time") cfg.grid.n_time = at.integer(value);
      else unknown();
    } else if (section == "output") {
      if (key == "path") cfg.output = value;
      else unknown();
    } else {
      at.fail("key outside of a section");
    }
  }

  if (utility.kind == "log") {
    if (utility.beta && *utility.beta != 1.0) throw ConfigError("log utility has beta = 1");
    cfg.utility = PowerUtility{1.0};
  } else if (utility.kind == "power") {
    cfg.utility = PowerUtility{utility.beta.value_or(1.0)};
  } else if (utility.kind == "exponential") {
    cfg.utility = ExponentialUtility{utility.alpha.value_or(1.0)};
  } else {
    throw ConfigError("unknown utility kind '" + utility.kind + "'");
  }

  if (claim.kind == "put" || claim.kind == "call") {
    if (!claim.strike) throw ConfigError("claim needs a strike");
    if (claim.kind == "put") cfg.claim.payoff = Put{*claim.strike};
    else cfg.claim.payoff = Call{*claim.strike};
  } else if (claim.kind == "custom") {
    cfg.claim.payoff = claim.table;
  } else {
    throw ConfigError("unknown claim kind '" + claim.kind + "'");
  }
  cfg.claim.maturity = claim.maturity;

  if (cfg.mode == DriftMode::DriftGiven) {
    if (cfg.mu.has_value() == cfg.mu_tilde.has_value())
      throw ConfigError("give exactly one of mu and mu_tilde");
  } else {
    if (cfg.mu || cfg.mu_tilde) throw ConfigError("implied-drift mode determines the drift; remove mu");
    if (!cfg.pi_star) throw ConfigError("implied-drift mode needs pi_star");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto num = [](double v) { return format_double(v); };
  out << "[market]\n";
  if (cfg.mu) out << "mu = " << num(*cfg.mu) << '\n';
  if (cfg.mu_tilde) out << "mu_tilde = " << num(*cfg.mu_tilde) << '\n';
  out << "sigma = " << num(cfg.sigma) << "\nrate = " << num(cfg.rate) << "\nspot = "
      << num(cfg.spot) << "\n\n[jumps]\n";
  for (const auto& a : cfg.atoms) out << "atom = " << num(a.z) << ", " << num(a.intensity) << '\n';

  out << "\n[utility]\n";
  if (const auto* p = std::get_if<PowerUtility>(&cfg.utility))
    out << "kind = power\nbeta = " << num(p->beta) << '\n';
  else
    out << "kind = exponential\nalpha = " << num(std::get<ExponentialUtility>(cfg.utility).alpha)
        << '\n';

  out << "\n[claim]\n";
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Put>) {
          out << "kind = put\nstrike = " << num(p.strike) << '\n';
        } else if constexpr (std::is_same_v<T, Call>) {
          out << "kind = call\nstrike = " << num(p.strike) << '\n';
        } else {
          out << "kind = custom\npoints = ";
          for (std::size_t i = 0; i < p.s.size(); ++i)
            out << (i ? ", " : "") << num(p.s[i]) << ':' << num(p.payoff[i]);
          out << '\n';
        }
      },
      cfg.claim.payoff);
  out << "maturity = " << num(cfg.claim.maturity) << '\n';

  out << "\n[method]\nname = "
      << (cfg.method == MethodName::Merton    ? "merton"
          : cfg.method == MethodName::Utility ? "utility"
                                              : "minvar")
      << "\nmode = " << (cfg.mode == DriftMode::DriftGiven ? "drift-given" : "implied-drift")
      << '\n';
  if (cfg.pi_star) out << "pi_star = " << num(*cfg.pi_star) << '\n';

  if (cfg.grid != GridOverrides{}) {
    out << "\n[grid]\n";
    if (cfg.grid.s_min) out << "s_min = " << num(*cfg.grid.s_min) << '\n';
    if (cfg.grid.s_max) out << "s_max = " << num(*cfg.grid.s_max) << '\n';
    if (cfg.grid.n_space) out << "n_space = " << *cfg.grid.n_space << '\n';
    if (cfg.grid.n_time) out << "n_time = " << *cfg.grid.n_time << '\n';
  }
  if (!cfg.output.empty()) out << "\n[output]\npath = " << cfg.output << '\n';
  return out.str();
}

MarketParams resolve_market(const RunConfig& cfg) {
  MarketParams market{cfg.mu.value_or(0.0), cfg.sigma, cfg.rate, JumpMeasure(cfg.atoms)};
  if (cfg.mode == DriftMode::ImpliedDrift) {
    const double pi = *cfg.pi_star;
    const OptimalInvestment target =
        std::holds_alternative<PowerUtility>(cfg.utility)
            ? OptimalInvestment{Fraction{pi}}
            : OptimalInvestment{Amount{pi * std::get<ExponentialUtility>(cfg.utility).alpha,
                                       std::get<ExponentialUtility>(cfg.utility).alpha}};
    market.mu = implied_drift(target, market, cfg.utility);
  } else if (cfg.mu_tilde) {
    market = market.with_average_drift(*cfg.mu_tilde);
  }
  validate_market(market);
  return market;
}

PricingMethod resolve_method(MethodName name, const UtilitySpec& utility,
                             const MarketParams& market) {
  switch (name) {
    case MethodName::Merton:
      return Merton{};
    case MethodName::MinimalVariance:
      return MinimalVariance{};
    case MethodName::Utility:
      break;
  }
  return MarginalUtility{utility, optimal_investment(market, utility)};
}

PricingMethod resolve_method(const RunConfig& cfg, const MarketParams& market) {
  return resolve_method(cfg.method, cfg.utility, market);
}

GridSpec resolve_grid(const RunConfig& cfg, const ClaimSpec& claim, const MarketParams& market) {
  GridSpec grid = default_grid(claim, market, cfg.grid.n_space.value_or(400),
                               cfg.grid.n_time.value_or(200));
  if (cfg.grid.s_min) grid.s_min = *cfg.grid.s_min;
  if (cfg.grid.s_max) grid.s_max = *cfg.grid.s_max;
  validate_grid(grid);
  return grid;
}

}  // namespace jumpdrift
