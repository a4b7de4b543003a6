#include <catch_amalgamated.hpp>

#include <cmath>

#include "jumpdrift/model.hpp"

using namespace jumpdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MarketParams fig1_market() {
  return {0.1125, 0.2, 0.0, JumpMeasure({{std::log(0.75), 0.25}})};
}

}  // namespace

TEST_CASE("figure market passes validation unchanged") {
  const MarketParams m = fig1_market();
  CHECK(validate_market(m) == m);
  CHECK(validate_market(validate_market(m)) == m);
}

TEST_CASE("validation names the broken invariant") {
  MarketParams m = fig1_market();
  m.sigma = 0.0;
  CHECK_THROWS_WITH(validate_market(m), ContainsSubstring("sigma"));

  MarketParams zero_jump{0.1, 0.2, 0.0, JumpMeasure({{0.0, 0.1}})};
  CHECK_THROWS_WITH(validate_market(zero_jump), ContainsSubstring("jump atom z=0"));

  MarketParams bad_intensity{0.1, 0.2, 0.0, JumpMeasure({{-0.1, 0.0}})};
  CHECK_THROWS_AS(validate_market(bad_intensity), ValidationError);

  MarketParams nan_mu{std::nan(""), 0.2, 0.0, {}};
  CHECK_THROWS_AS(validate_market(nan_mu), ValidationError);
}

TEST_CASE("jump moments") {
  CHECK(jump_moment(JumpMeasure{}, 1) == 0.0);
  const JumpMeasure one({{std::log(0.75), 0.25}});
  CHECK_THAT(jump_moment(one, 1), WithinAbs(-0.0625, 1e-15));
  CHECK_THAT(jump_moment(one, 2), WithinAbs(0.015625, 1e-15));

  const JumpMeasure two({{-0.3, 0.2}, {0.1, 0.7}});
  const double w[] = {2.0, 0.5};
  const double expected =
      2.0 * std::pow(std::exp(-0.3) - 1.0, 3) * 0.2 + 0.5 * std::pow(std::exp(0.1) - 1.0, 3) * 0.7;
  CHECK_THAT(jump_moment(two, 3, w), WithinRel(expected, 1e-14));

  const double short_weights[] = {1.0};
  CHECK_THROWS_AS(jump_moment(two, 1, short_weights), ValidationError);
  CHECK_THROWS_AS(jump_moment(two, 0), ValidationError);
}

TEST_CASE("jump moments are linear in the intensities") {
  const JumpMeasure m({{-0.4, 0.3}, {0.25, 0.15}, {-0.05, 1.2}});
  for (int k = 1; k <= 4; ++k)
    CHECK_THAT(jump_moment(m.scaled(2.0), k), WithinRel(2.0 * jump_moment(m, k), 1e-14));
}

TEST_CASE("average drift adds the jump compensator") {
  const MarketParams m = fig1_market();
  CHECK_THAT(m.average_drift(), WithinAbs(0.05, 1e-15));
  CHECK_THAT(m.average_drift() - m.mu, WithinAbs(jump_moment(m.jumps, 1), 1e-16));
  const MarketParams back = m.with_average_drift(-0.05);
  CHECK_THAT(back.mu, WithinAbs(0.0125, 1e-15));
  CHECK_THAT(back.average_drift(), WithinAbs(-0.05, 1e-15));
}

TEST_CASE("relative and log jump sizes") {
  const JumpAtom a = JumpAtom::from_relative(-0.25, 0.25);
  CHECK_THAT(a.z, WithinAbs(std::log(0.75), 1e-16));
  CHECK_THAT(a.relative_size(), WithinAbs(-0.25, 1e-16));
}

TEST_CASE("utilities") {
  CHECK_THAT(utility_value(PowerUtility{1.0}, std::exp(2.0)), WithinAbs(2.0, 1e-15));
  CHECK_THAT(utility_value(PowerUtility{3.0}, 2.0), WithinRel(std::pow(2.0, -2.0) / -2.0, 1e-15));
  CHECK_THAT(marginal_utility(PowerUtility{3.0}, 2.0), WithinRel(0.125, 1e-15));
  CHECK_THAT(utility_value(ExponentialUtility{0.5}, 2.0), WithinRel(-std::exp(-1.0), 1e-15));
  CHECK_THAT(marginal_utility(ExponentialUtility{0.5}, 2.0), WithinRel(0.5 * std::exp(-1.0), 1e-15));
  CHECK_THROWS_AS(validate_utility(PowerUtility{0.5}), ValidationError);
  CHECK_THROWS_AS(validate_utility(ExponentialUtility{0.0}), ValidationError);
}

TEST_CASE("payoffs") {
  const ClaimSpec put{Put{100.0}, 1.0};
  CHECK(put(80.0) == 20.0);
  CHECK(put(120.0) == 0.0);
  const ClaimSpec call{Call{100.0}, 1.0};
  CHECK(call(130.0) == 30.0);

  // Custom payoffs interpolate linearly and continue the end segments.
  const ClaimSpec custom{CustomPayoff{{50.0, 100.0, 150.0}, {10.0, 0.0, 5.0}}, 1.0};
  CHECK_THAT(custom(75.0), WithinAbs(5.0, 1e-14));
  CHECK_THAT(custom(25.0), WithinAbs(15.0, 1e-14));
  CHECK_THAT(custom(200.0), WithinAbs(10.0, 1e-14));

  const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(5, 60.0, 140.0);
  const Eigen::VectorXd v = put(s);
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(v[i] == put(s[i]));
}

TEST_CASE("affine tails of the payoffs") {
  const ClaimSpec put{Put{100.0}, 1.0};
  CHECK(put.lower_tail().a == 100.0);
  CHECK(put.lower_tail().b == -1.0);
  CHECK(put.upper_tail().a == 0.0);
  CHECK(put.upper_tail().b == 0.0);
  const ClaimSpec call{Call{100.0}, 1.0};
  CHECK(call.upper_tail().a == -100.0);
  CHECK(call.upper_tail().b == 1.0);
  CHECK_THAT(call.upper_tail().discounted(300.0, 0.05, 2.0),
             WithinRel(300.0 - 100.0 * std::exp(-0.1), 1e-15));
}

TEST_CASE("claim validation") {
  CHECK_THROWS_AS(validate_claim({Put{-1.0}, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_claim({Put{100.0}, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate_claim({CustomPayoff{{100.0, 50.0}, {0.0, 1.0}}, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_claim({CustomPayoff{{100.0}, {}}, 1.0}), ValidationError);
  CHECK_NOTHROW(validate_claim({Call{100.0}, 0.5}));
}
