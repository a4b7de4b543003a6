#include "jumpdrift/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jumpdrift/black_scholes.hpp"
#include "jumpdrift/config.hpp"
#include "jumpdrift/csv.hpp"
#include "jumpdrift/errors.hpp"
#include "jumpdrift/figures.hpp"
#include "jumpdrift/hedging.hpp"
#include "jumpdrift/invest.hpp"
#include "jumpdrift/oracle.hpp"
#include "jumpdrift/series.hpp"

namespace jumpdrift::cli {

namespace {

// Destination of a CSV: an explicit path, the default directory, or the
// caller's stream.
class Output {
 public:
  Output(const std::string& path, const std::string& default_name, std::ostream& fallback)
      : stream_(&fallback) {
    std::string target = path;
    if (target.empty()) {
      if (const char* dir = std::getenv("JUMPDRIFT_OUT_DIR"); dir && *dir)
        target = (std::filesystem::path(dir) / default_name).string();
    }
    if (!target.empty()) {
      file_.open(target, std::ios::binary);
      if (!file_) throw ValidationError("cannot write " + target);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct StrikeRange {
  double lo, hi, step;
};

StrikeRange parse_strikes(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--strikes expects lo:hi:step, got '" + text + "'");
    }
  }
  if (parts.size() != 3 || !(parts[0] > 0.0) || !(parts[1] >= parts[0]) || !(parts[2] > 0.0))
    throw ValidationError("--strikes expects 0 < lo <= hi and step > 0, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

std::vector<double> strike_grid(const StrikeRange& r) {
  std::vector<double> k;
  const auto n = static_cast<long>(std::floor((r.hi - r.lo) / r.step + 1e-9));
  for (long i = 0; i <= n; ++i) k.push_back(r.lo + static_cast<double>(i) * r.step);
  return k;
}

ClaimSpec with_strike(const ClaimSpec& claim, double strike) {
  ClaimSpec c = claim;
  if (claim.is_put()) c.payoff = Put{strike};
  else c.payoff = Call{strike};
  return c;
}

void warn_if_signed(const PricingMeasure& measure, std::ostream& err) {
  if (const auto w = signed_measure_warning(measure)) err << *w << '\n';
}

std::string route_name(PricingRoute r) { return r == PricingRoute::Series ? "series" : "pide"; }

struct Options {
  std::string config;
  std::string out;
  std::string method;
  std::string strikes;
  std::optional<double> spot;
  double t = 0.0;
  // implied-vol
  double price = 0.0;
  double strike = 100.0;
  double maturity = 1.0;
  double rate = 0.0;
  std::string kind = "put";
  // figures
  std::string name;
};

RunConfig config_with_method(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (!o.method.empty()) cfg.method = parse_method_name(o.method);
  if (o.spot) cfg.spot = *o.spot;
  return cfg;
}

// An output path in the config acts like --out.
std::string out_path(const Options& o, const RunConfig* cfg) {
  if (!o.out.empty()) return o.out;
  return cfg ? cfg->output : std::string();
}

int cmd_invest(const Options& o, std::ostream& out) {
  const RunConfig cfg = config_with_method(o);
  const MarketParams market = resolve_market(cfg);
  const OptimalInvestment inv = optimal_investment(market, cfg.utility);
  Output dest(out_path(o, &cfg), "invest.csv", out);
  CsvWriter csv(dest.stream(), {"quantity", "value"});
  csv.row({std::string("mu"), market.mu});
  csv.row({std::string("mu_tilde"), market.average_drift()});
  if (const auto* f = std::get_if<Fraction>(&inv)) {
    csv.row({std::string("beta"), std::get<PowerUtility>(cfg.utility).beta});
    csv.row({std::string("pi_tilde"), f->pi_tilde});
  } else {
    const auto& a = std::get<Amount>(inv);
    csv.row({std::string("alpha"), a.alpha});
    csv.row({std::string("pi_bar"), a.pi_bar});
    csv.row({std::string("amount"), a.amount()});
  }
  return kExitOk;
}

int cmd_price(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = config_with_method(o);
  const MarketParams market = resolve_market(cfg);
  const PricingMethod method = resolve_method(cfg, market);
  const PricingMeasure measure = pricing_measure(market, method);
  warn_if_signed(measure, err);

  std::vector<ClaimSpec> claims;
  if (!o.strikes.empty()) {
    if (!cfg.claim.is_vanilla()) throw ValidationError("--strikes needs a put or call claim");
    for (const double k : strike_grid(parse_strikes(o.strikes)))
      claims.push_back(with_strike(cfg.claim, k));
  } else {
    claims.push_back(cfg.claim);
  }

  Output dest(out_path(o, &cfg), "price.csv", out);
  CsvWriter csv(dest.stream(), {"strike", "moneyness_k_over_s", "moneyness_s_over_k", "spot",
                                "price", "implied_vol", "method", "route"});
  const std::string label = method_label(method);
  for (const auto& claim : claims) {
    const std::optional<GridSpec> grid =
        cfg.grid == GridOverrides{} ? std::nullopt
                                    : std::optional<GridSpec>(resolve_grid(cfg, claim, market));
    const PriceQuote q = price_claim(market, measure, claim, cfg.spot, grid);
    std::vector<CsvWriter::Cell> row;
    if (claim.is_vanilla()) {
      const double k = claim.reference_price();
      row = {k, k / cfg.spot, cfg.spot / k, cfg.spot, q.value};
      try {
        row.emplace_back(implied_vol(q.value, cfg.spot, k, market.rate, claim.maturity,
                                     claim.is_put() ? OptionKind::Put : OptionKind::Call));
      } catch (const OutOfBounds&) {
        row.emplace_back(std::string());
      }
    } else {
      row = {std::string(), std::string(), std::string(), cfg.spot, q.value, std::string()};
    }
    row.emplace_back(label);
    row.emplace_back(route_name(q.route));
    csv.row(row);
  }
  return kExitOk;
}

int cmd_hedge(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = config_with_method(o);
  const MarketParams market = resolve_market(cfg);
  const PricingMethod method = resolve_method(cfg, market);
  const PricingMeasure measure = pricing_measure(market, method);
  warn_if_signed(measure, err);
  const PideSolution sol =
      solve_pide(measure, cfg.claim, market, resolve_grid(cfg, cfg.claim, market),
                 method_label(method));
  if (!(o.t >= 0.0 && o.t <= cfg.claim.maturity))
    throw ValidationError("--t must lie between 0 and the maturity");

  std::vector<HedgeCurve> curves;
  switch (cfg.method) {
    case MethodName::Merton:
      curves.push_back(delta_hedge(sol, o.t));
      break;
    case MethodName::MinimalVariance:
      curves.push_back(minimal_variance_hedge(sol, market, o.t));
      break;
    case MethodName::Utility:
      curves.push_back(marginal_optimal_hedge(sol, market, hedge_weights(market, method), o.t));
      curves.push_back(derivative_of_price_hedge(sol, o.t));
      break;
  }
  Output dest(out_path(o, &cfg), "hedge.csv", out);
  write_hedge_csv(curves, dest.stream());
  return kExitOk;
}

int cmd_implied_vol(const Options& o, std::ostream& out) {
  if (o.kind != "put" && o.kind != "call") throw ValidationError("--kind must be put or call");
  const double spot = o.spot.value_or(100.0);
  const double vol = implied_vol(o.price, spot, o.strike, o.rate, o.maturity,
                                 o.kind == "put" ? OptionKind::Put : OptionKind::Call);
  out << format_double(vol) << '\n';
  return kExitOk;
}

struct Check {
  std::string name;
  double expected;
  double actual;
  double tolerance;
  bool pass() const { return std::abs(actual - expected) <= tolerance; }
};

std::vector<Check> run_checks() {
  std::vector<Check> checks;
  const MarketParams market = figure_market(0.05);
  const ClaimSpec put{Put{100.0}, 1.0};

  const double root = optimal_fraction_power(market, 1.0).pi_tilde;
  checks.push_back({"log_closed_form_vs_root", root,
                    optimal_fraction_log_fixed_jump(market).pi_tilde, 1e-10});

  const double pi_bar = optimal_amount_exponential(market, 1.0).pi_bar;
  checks.push_back({"beta_limit_1000", pi_bar,
                    1000.0 * optimal_fraction_power(market, 1000.0).pi_tilde,
                    0.01 * std::abs(pi_bar)});

  const PricingMethod log_method = MarginalUtility{PowerUtility{1.0}, Fraction{root}};
  for (const auto& [name, method] : {std::pair<std::string, PricingMethod>{"merton", Merton{}},
                                     {"utility_log", log_method},
                                     {"minvar", MinimalVariance{}}}) {
    const PricingMeasure q = pricing_measure(market, method);
    const double series =
        price_series_fixed_jump(q.adjusted_intensities[0], market.jumps[0].z, market, put, 100.0, 0.0)
            .value;
    const double pide = solve_pide(q, put, market, default_grid(put, market)).value_at(100.0, 0.0);
    checks.push_back({"pide_vs_series_" + name, series, pide, 1e-3 * series});
  }

  const MarketParams diffusion{0.1, 0.2, 0.0, JumpMeasure{}};
  const double bs = black_scholes(100.0, 100.0, 0.0, 0.0, 0.2, 1.0, OptionKind::Put);
  checks.push_back({"pide_vs_black_scholes",
                    bs,
                    solve_pide(pricing_measure(diffusion, Merton{}), put, diffusion,
                               default_grid(put, diffusion))
                        .value_at(100.0, 0.0),
                    2e-3 * bs});

  const ClaimSpec forward{CustomPayoff{{50.0, 200.0}, {50.0, 200.0}}, 1.0};
  checks.push_back({"martingale_minvar", 100.0,
                    solve_pide(pricing_measure(market, MinimalVariance{}), forward, market,
                               default_grid(forward, market))
                        .value_at(100.0, 0.0),
                    0.1});

  McSpec mc;
  mc.n_paths = 20000;
  const McEstimate est = mc_marginal_price(market, PowerUtility{1.0}, put, mc, 100.0);
  const PricingMeasure q = pricing_measure(market, log_method);
  const double series =
      price_series_fixed_jump(q.adjusted_intensities[0], market.jumps[0].z, market, put, 100.0, 0.0)
          .value;
  checks.push_back({"mc_vs_series_utility_log", series, est.estimate, 3.0 * est.standard_error});

  const double call = black_scholes(110.0, 100.0, 0.01, 0.0, 0.3, 0.5, OptionKind::Call);
  checks.push_back({"implied_vol_roundtrip", 0.3,
                    implied_vol(call, 110.0, 100.0, 0.01, 0.5, OptionKind::Call), 1e-8});
  return checks;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const std::vector<Check> checks = run_checks();
  Output dest(o.out, "verify.csv", out);
  CsvWriter csv(dest.stream(), {"check", "expected", "actual", "tolerance", "pass"});
  bool all = true;
  for (const auto& c : checks) {
    csv.row({c.name, c.expected, c.actual, c.tolerance, std::string(c.pass() ? "true" : "false")});
    all = all && c.pass();
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_figures(const Options& o, std::ostream& out) {
  if (o.name == "all") {
    std::string dir = o.out;
    if (dir.empty())
      if (const char* env = std::getenv("JUMPDRIFT_OUT_DIR"); env && *env) dir = env;
    if (dir.empty()) throw ValidationError("--name all needs --out DIR or JUMPDRIFT_OUT_DIR");
    std::filesystem::create_directories(dir);
    for (const auto& name : figure_names()) {
      std::ostringstream buffer;
      reproduce_figure(name, buffer);
      Output dest((std::filesystem::path(dir) / (name + ".csv")).string(), "", out);
      dest.stream() << buffer.str();
    }
    return kExitOk;
  }
  // Render first so an unknown name does not leave an empty file behind.
  std::ostringstream buffer;
  reproduce_figure(o.name, buffer);
  Output dest(o.out, o.name + ".csv", out);
  dest.stream() << buffer.str();
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pricing and hedging of European claims on a jump-diffusion asset", "jumpdrift"};
  app.require_subcommand(1);
  Options o;

  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config,-c", o.config, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out,-o", o.out, "output CSV path");
  };

  CLI::App* invest = app.add_subcommand("invest", "optimal investment for the configured utility");
  add_config(invest);

  CLI::App* price = app.add_subcommand("price", "price the configured claim");
  add_config(price);
  price->add_option("--method", o.method, "merton, utility or minvar (overrides the config)")
      ->check(CLI::IsMember({"merton", "utility", "minvar"}));
  price->add_option("--strikes", o.strikes, "strike range lo:hi:step");
  price->add_option("--spot", o.spot, "spot price (overrides the config)");

  CLI::App* hedge = app.add_subcommand("hedge", "hedge curves for the configured claim");
  add_config(hedge);
  hedge->add_option("--method", o.method, "merton, utility or minvar (overrides the config)")
      ->check(CLI::IsMember({"merton", "utility", "minvar"}));
  hedge->add_option("--t", o.t, "time at which the hedge is evaluated");

  CLI::App* iv = app.add_subcommand("implied-vol", "Black-Scholes implied volatility");
  iv->add_option("--price", o.price, "option price")->required();
  iv->add_option("--spot", o.spot, "spot price (default 100)");
  iv->add_option("--strike", o.strike, "strike");
  iv->add_option("--maturity", o.maturity, "time to maturity in years");
  iv->add_option("--rate", o.rate, "interest rate");
  iv->add_option("--kind", o.kind, "put or call")->check(CLI::IsMember({"put", "call"}));

  CLI::App* verify = app.add_subcommand("verify", "run the built-in cross checks");
  verify->add_option("--out,-o", o.out, "report CSV path");

  CLI::App* figures = app.add_subcommand("figures", "write the data behind a figure");
  figures->add_option("--name", o.name, "fig1 ... fig7, or all")->required();
  figures->add_option("--out,-o", o.out, "output CSV path (a directory for --name all)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*invest) return cmd_invest(o, out);
    if (*price) return cmd_price(o, out, err);
    if (*hedge) return cmd_hedge(o, out, err);
    if (*iv) return cmd_implied_vol(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*figures) return cmd_figures(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace jumpdrift::cli
