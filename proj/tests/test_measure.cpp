#include <catch_amalgamated.hpp>

#include <cmath>

#include "jumpdrift/invest.hpp"
#include "jumpdrift/measure.hpp"
#include "oracles.hpp"

using namespace jumpdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const MarketParams kFig1{0.1125, 0.2, 0.0, JumpMeasure({JumpAtom::from_relative(-0.25, 0.25)})};

PricingMethod log_utility(const MarketParams& m) {
  return MarginalUtility{PowerUtility{1.0}, optimal_fraction_power(m, 1.0)};
}

void check_compensated(const MarketParams& m, const PricingMeasure& q) {
  double jump_drift = 0.0;
  for (std::size_t i = 0; i < m.jumps.size(); ++i)
    jump_drift += m.jumps[i].relative_size() * q.adjusted_intensities[static_cast<Eigen::Index>(i)];
  CHECK_THAT(q.drift_q + jump_drift, WithinAbs(0.0, 1e-15));
}

}  // namespace

TEST_CASE("Merton measure keeps the intensities") {
  const PricingMeasure q = pricing_measure(kFig1, Merton{});
  CHECK(q.adjusted_intensities[0] == 0.25);
  CHECK_THAT(q.drift_q, WithinAbs(0.0625, 1e-16));
  CHECK_FALSE(q.is_signed);
  CHECK(method_label(Merton{}) == "merton");
}

TEST_CASE("log-utility measure raises the downward intensity") {
  const double pi = oracle::log_fraction_quadratic(0.1125, 0.2, 0.25, -0.25);
  const PricingMeasure q = pricing_measure(kFig1, log_utility(kFig1));
  CHECK_THAT(q.adjusted_intensities[0], WithinRel(0.25 / (1.0 - 0.25 * pi), 1e-12));
  CHECK_THAT(q.adjusted_intensities[0], WithinAbs(0.3161, 5e-4));
  CHECK(q.adjusted_intensities[0] > 0.25);
  check_compensated(kFig1, q);
  CHECK(method_label(log_utility(kFig1)) == "utility_log");
}

TEST_CASE("upward atoms become less frequent for a long investor") {
  const MarketParams m{0.05, 0.2, 0.0,
                       JumpMeasure({JumpAtom::from_relative(-0.3, 0.2), JumpAtom::from_relative(0.2, 0.4)})};
  for (double beta : {1.0, 3.0}) {
    const PricingMethod method = MarginalUtility{PowerUtility{beta}, optimal_fraction_power(m, beta)};
    REQUIRE(std::get<Fraction>(std::get<MarginalUtility>(method).investment).pi_tilde > 0.0);
    const PricingMeasure q = pricing_measure(m, method);
    CHECK(q.adjusted_intensities[0] > 0.2);
    CHECK(q.adjusted_intensities[1] < 0.4);
    check_compensated(m, q);
  }
}

TEST_CASE("zero position reproduces the Merton measure") {
  const PricingMeasure merton = pricing_measure(kFig1, Merton{});
  const PricingMeasure power = pricing_measure(kFig1, MarginalUtility{PowerUtility{3.0}, Fraction{0.0}});
  const PricingMeasure expo = pricing_measure(kFig1, MarginalUtility{ExponentialUtility{2.0}, Amount{0.0, 2.0}});
  CHECK(power.adjusted_intensities == merton.adjusted_intensities);
  CHECK(expo.adjusted_intensities == merton.adjusted_intensities);
  CHECK(power.drift_q == merton.drift_q);
}

TEST_CASE("market price of risk") {
  const MarketParams diffusion{0.1, 0.2, 0.0, {}};
  CHECK_THAT(market_price_of_risk_alpha(diffusion), WithinRel(2.5, 1e-15));
  const MarketParams flat{0.0625, 0.2, 0.0, kFig1.jumps};
  CHECK_THAT(market_price_of_risk_alpha(flat), WithinAbs(0.0, 1e-15));
  const double mean = 0.1125 + 0.25 * -0.25;
  const double var = 0.04 + 0.25 * 0.0625;
  CHECK_THAT(market_price_of_risk_alpha(kFig1), WithinRel(mean / var, 1e-14));
  CHECK_THAT(market_price_of_risk_alpha(kFig1), WithinAbs(0.8989, 1e-4));
}

TEST_CASE("minimal-variance measure") {
  const PricingMeasure q = pricing_measure(kFig1, MinimalVariance{});
  const double alpha = 0.05 / 0.055625;
  CHECK_THAT(q.adjusted_intensities[0], WithinRel(0.25 * (1.0 + 0.25 * alpha), 1e-14));
  CHECK_FALSE(q.is_signed);
  CHECK_FALSE(signed_measure_warning(q).has_value());
  check_compensated(kFig1, q);
}

TEST_CASE("large upward jumps make the minimal-variance measure signed") {
  // alpha (e^z - 1) = 0.5 / (0.04 + 0.1) * 1 > 1
  const MarketParams m{0.4, 0.2, 0.0, JumpMeasure({{std::log(2.0), 0.1}})};
  const double alpha = market_price_of_risk_alpha(m);
  REQUIRE(alpha * 1.0 > 1.0);
  const PricingMeasure q = pricing_measure(m, MinimalVariance{});
  CHECK(q.is_signed);
  CHECK(q.adjusted_intensities[0] < 0.0);
  check_compensated(m, q);
  const auto warning = signed_measure_warning(q);
  REQUIRE(warning.has_value());
  CHECK_THAT(*warning, ContainsSubstring("signed"));
  CHECK(warning->find('\n') == std::string::npos);
}

TEST_CASE("hedge weights") {
  const double pi = optimal_fraction_power(kFig1, 1.0).pi_tilde;
  const HedgeWeights w = hedge_weights(kFig1, log_utility(kFig1));
  CHECK_THAT(w[0], WithinRel(std::pow(1.0 - 0.25 * pi, -2.0), 1e-13));
  CHECK_THAT(w[0], WithinAbs(1.599, 1e-3));
  // Power: one extra factor of the weight base compared with pricing.
  const Eigen::VectorXd pw = pricing_weights(kFig1, log_utility(kFig1));
  CHECK_THAT(w[0], WithinRel(std::pow(pw[0], 2.0), 1e-13));
  for (double beta : {2.0, 5.0}) {
    const Fraction f = optimal_fraction_power(kFig1, beta);
    const PricingMethod m = MarginalUtility{PowerUtility{beta}, f};
    CHECK_THAT(hedge_weights(kFig1, m)[0],
               WithinRel(pricing_weights(kFig1, m)[0] / (1.0 - 0.25 * f.pi_tilde), 1e-13));
  }

  const PricingMethod expo = MarginalUtility{ExponentialUtility{1.0}, optimal_amount_exponential(kFig1, 1.0)};
  CHECK(hedge_weights(kFig1, expo) == pricing_weights(kFig1, expo));

  CHECK(hedge_weights(kFig1, MinimalVariance{}) == Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(hedge_weights(kFig1, Merton{}), UnsupportedMethod);
}

TEST_CASE("power weights approach exponential weights") {
  const MarketParams m{0.1, 0.2, 0.0,
                       JumpMeasure({JumpAtom::from_relative(-0.25, 0.25), JumpAtom::from_relative(0.1, 0.5)})};
  const Amount a = optimal_amount_exponential(m, 1.0);
  const Eigen::VectorXd we = pricing_weights(m, MarginalUtility{ExponentialUtility{1.0}, a});
  const double beta = 1000.0;
  const Eigen::VectorXd wp =
      pricing_weights(m, MarginalUtility{PowerUtility{beta}, Fraction{a.pi_bar / beta}});
  for (Eigen::Index i = 0; i < we.size(); ++i) CHECK(std::abs(wp[i] / we[i] - 1.0) <= 0.01);
}

TEST_CASE("mismatched pairings are rejected") {
  CHECK_THROWS_AS(pricing_measure(kFig1, MarginalUtility{PowerUtility{2.0}, Amount{0.3, 1.0}}), WrongMeasure);
  CHECK_THROWS_AS(pricing_measure(kFig1, MarginalUtility{ExponentialUtility{1.0}, Fraction{0.3}}), WrongMeasure);
  CHECK_THROWS_AS(pricing_measure(kFig1, MarginalUtility{PowerUtility{1.0}, Fraction{4.5}}), DomainError);
}
