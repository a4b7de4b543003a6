#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jumpdrift/cli.hpp"
#include "jumpdrift/config.hpp"
#include "jumpdrift/figures.hpp"
#include "jumpdrift/invest.hpp"

using namespace jumpdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

const char* kFig1Config = R"(# fixed-jump example
[market]
mu_tilde = 0.05
sigma = 0.2
rate = 0

[jumps]
atom_rel = -0.25, 0.25

[utility]
kind = log

[claim]
kind = put
strike = 100
maturity = 1

[method]
name = utility
)";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("jumpdrift_cli_" + std::to_string(counter_++) + "_" +
                                         std::to_string(std::rand()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

// Column `name` of a CSV as doubles.
std::vector<double> column(const std::string& csv, const std::string& name) {
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto header = split_line(line);
  const auto idx = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  REQUIRE(idx < header.size());
  std::vector<double> v;
  while (std::getline(in, line)) v.push_back(std::stod(split_line(line).at(idx)));
  return v;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kFig1Config);
  CHECK(cfg.mu_tilde == 0.05);
  CHECK_FALSE(cfg.mu.has_value());
  REQUIRE(cfg.atoms.size() == 1);
  CHECK_THAT(cfg.atoms[0].relative_size(), WithinAbs(-0.25, 1e-16));
  CHECK(std::get<PowerUtility>(cfg.utility).beta == 1.0);
  CHECK(cfg.claim == ClaimSpec{Put{100.0}, 1.0});
  CHECK(cfg.method == MethodName::Utility);
  CHECK_THAT(resolve_market(cfg).mu, WithinAbs(0.1125, 1e-15));
}

TEST_CASE("config roundtrip") {
  RunConfig cfg = parse_config(kFig1Config);
  CHECK(parse_config(serialize_config(cfg)) == cfg);

  cfg.mu_tilde.reset();
  cfg.mu = 0.1 / 3.0;
  cfg.atoms.push_back({0.123456789012345678, 0.7});
  cfg.utility = ExponentialUtility{2.5};
  cfg.claim = {CustomPayoff{{50.0, 100.0, 150.0}, {1.0 / 3.0, 0.0, 2.0}}, 0.75};
  cfg.method = MethodName::MinimalVariance;
  cfg.grid.n_space = 801;
  cfg.grid.s_max = 1000.0;
  cfg.output = "out.csv";
  CHECK(parse_config(serialize_config(cfg)) == cfg);

  RunConfig implied = parse_config(kFig1Config);
  implied.mu_tilde.reset();
  implied.mode = DriftMode::ImpliedDrift;
  implied.pi_star = 0.5;
  implied.claim = {Call{90.0}, 2.0};
  CHECK(parse_config(serialize_config(implied)) == implied);
}

TEST_CASE("mu and mu_tilde give the same market") {
  std::string with_mu = kFig1Config;
  with_mu.replace(with_mu.find("mu_tilde = 0.05"), 15, "mu = 0.1125");
  const MarketParams a = resolve_market(parse_config(kFig1Config));
  const MarketParams b = resolve_market(parse_config(with_mu));
  CHECK_THAT(a.mu, WithinAbs(b.mu, 1e-15));
  CHECK(optimal_fraction_power(a, 1.0).pi_tilde == Catch::Approx(optimal_fraction_power(b, 1.0).pi_tilde).epsilon(1e-13));
}

TEST_CASE("config invariants") {
  const std::string base = kFig1Config;
  CHECK_THROWS_AS(parse_config(base + "[market]\nmu = 0.1\n"), ConfigError);
  std::string no_drift = base;
  no_drift.erase(no_drift.find("mu_tilde = 0.05"), 15);
  CHECK_THROWS_AS(parse_config(no_drift), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "mode = implied-drift\npi_star = 0.5\n"), ConfigError);
  CHECK_NOTHROW(parse_config(no_drift + "mode = implied-drift\npi_star = 0.5\n"));
  CHECK_THROWS_AS(parse_config(no_drift + "mode = implied-drift\n"), ConfigError);
  CHECK_THROWS_WITH(parse_config(base + "[market]\nsigma = abc\n"), ContainsSubstring("line"));
  CHECK_THROWS_AS(parse_config(base + "[colour]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "[claim]\nshape = round\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "[method]\nname = magic\n"), ConfigError);
}

TEST_CASE("implied-drift config") {
  std::string text = kFig1Config;
  text.erase(text.find("mu_tilde = 0.05"), 15);
  text += "mode = implied-drift\npi_star = 0.5\n";
  const RunConfig cfg = parse_config(text);
  const MarketParams m = resolve_market(cfg);
  CHECK_THAT(optimal_fraction_power(m, 1.0).pi_tilde, WithinAbs(0.5, 1e-10));
}

TEST_CASE("invest prints the optimal fraction") {
  TempDir dir;
  const Run r = run({"invest", "--config", write(dir / "fig1.cfg", kFig1Config)});
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("pi_tilde,0.8367"));
}

TEST_CASE("price writes a strike table") {
  TempDir dir;
  const std::string cfg = write(dir / "fig1.cfg", kFig1Config);
  const Run r = run({"price", "--method", "merton", "--config", cfg, "--strikes", "50:200:5"});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.out, StartsWith("strike,moneyness_k_over_s,moneyness_s_over_k,spot,price,implied_vol,method,route\n"));
  const auto strikes = column(r.out, "strike");
  CHECK(strikes.size() == 31);
  CHECK(strikes.front() == 50.0);
  CHECK(strikes.back() == 200.0);
  for (double iv : column(r.out, "implied_vol")) CHECK(iv > 0.2);
  CHECK(r.err.empty());

  // Same run twice: identical bytes, also through a file.
  const Run again = run({"price", "--method", "merton", "--config", cfg, "--strikes", "50:200:5"});
  CHECK(again.out == r.out);
  const std::string path = (dir / "p.csv").string();
  CHECK(run({"price", "--method", "merton", "--config", cfg, "--strikes", "50:200:5", "--out", path}).code == 0);
  CHECK(read(path) == r.out);
}

TEST_CASE("signed measures are priced with a warning") {
  TempDir dir;
  const std::string cfg = write(dir / "signed.cfg", R"([market]
mu = 0.4
sigma = 0.2
[jumps]
atom = 0.6931471805599453, 0.1
[claim]
kind = custom
points = 100:0, 200:0, 400:100
maturity = 1
[method]
name = minvar
)");
  const Run r = run({"price", "--config", cfg});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.err, ContainsSubstring("warning"));
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(column(r.out, "price").front() < 0.0);
  const Run h = run({"hedge", "--config", cfg});
  CHECK(h.code == 0);
  CHECK_THAT(h.err, ContainsSubstring("warning"));
  CHECK_THAT(h.out, ContainsSubstring("minimal_variance"));
}

TEST_CASE("hedge output") {
  TempDir dir;
  const Run r = run({"hedge", "--config", write(dir / "fig1.cfg", kFig1Config)});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.out, StartsWith("s,units_of_asset,wealth_in_asset,label\n"));
  CHECK_THAT(r.out, ContainsSubstring(",marginal_optimal\n"));
  CHECK_THAT(r.out, ContainsSubstring(",price_derivative\n"));
}

TEST_CASE("implied-vol subcommand") {
  const Run r = run({"implied-vol", "--price", "7.965567455405804", "--spot", "100", "--strike", "100"});
  REQUIRE(r.code == 0);
  CHECK_THAT(std::stod(r.out), WithinAbs(0.2, 1e-8));
  CHECK(run({"implied-vol", "--price", "-1"}).code == cli::kExitError);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"price"}).code == cli::kExitUsage);
  CHECK(run({"price", "--config", "/nonexistent/file.cfg"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == 0);

  TempDir dir;
  const Run bad = run({"invest", "--config", write(dir / "bad.cfg", "[market]\nsigma = 0\nmu = 0.1\n")});
  CHECK(bad.code == cli::kExitError);
  CHECK_THAT(bad.err, StartsWith("error: "));
  CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);

  const Run strikes = run({"price", "--config", write(dir / "fig1.cfg", kFig1Config), "--strikes", "50:abc"});
  CHECK(strikes.code == cli::kExitError);
}

TEST_CASE("figures") {
  SECTION("fig1 columns and the moneyness conventions") {
    const Run r = run({"figures", "--name", "fig1"});
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, StartsWith("moneyness,iv_merton,iv_utility_log,iv_minvar,iv_reference,"));
    const auto k_over_s = column(r.out, "moneyness_k_over_s");
    const auto s_over_k = column(r.out, "moneyness_s_over_k");
    for (std::size_t i = 0; i < k_over_s.size(); ++i) CHECK_THAT(k_over_s[i] * s_over_k[i], WithinAbs(1.0, 1e-15));
  }
  SECTION("unknown names") {
    const Run r = run({"figures", "--name", "fig9"});
    CHECK(r.code == cli::kExitError);
    CHECK_THROWS_AS([] { std::ostringstream o; reproduce_figure("fig0", o); }(), UnknownFigure);
  }
  SECTION("deterministic output") {
    CHECK(run({"figures", "--name", "fig3"}).out == run({"figures", "--name", "fig3"}).out);
  }
  SECTION("output directory from the environment") {
    TempDir dir;
    ::setenv("JUMPDRIFT_OUT_DIR", dir.path().c_str(), 1);
    const Run r = run({"figures", "--name", "fig2"});
    ::unsetenv("JUMPDRIFT_OUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK_THAT(read(dir / "fig2.csv"), StartsWith("moneyness,"));
  }
  SECTION("all figures into a directory") {
    TempDir dir;
    REQUIRE(run({"figures", "--name", "all", "--out", dir.path().string()}).code == 0);
    for (const auto& name : figure_names()) CHECK(fs::file_size(dir / (name + ".csv")) > 100);
  }
}

TEST_CASE("verify report") {
  const Run r = run({"verify"});
  CHECK(r.code == 0);
  CHECK_THAT(r.out, StartsWith("check,expected,actual,tolerance,pass\n"));
  CHECK(r.out.find(",false\n") == std::string::npos);
}

TEST_CASE("the installed tool runs") {
  TempDir dir;
  const std::string cfg = write(dir / "fig1.cfg", kFig1Config);
  const std::string out = (dir / "invest.csv").string();
  const std::string cmd = std::string(JUMPDRIFT_TOOL) + " invest --config " + cfg + " --out " + out;
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK_THAT(read(out), ContainsSubstring("pi_tilde,0.8367"));
  const std::string usage = std::string(JUMPDRIFT_TOOL) + " nonsense 2>/dev/null";
  const int status = std::system(usage.c_str());
  CHECK(WEXITSTATUS(status) == cli::kExitUsage);
}
