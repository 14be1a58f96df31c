#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

#include "levyfp/rvcalc.hpp"

using namespace levyfp;

TEST(SlowlyVarying, ConstantFamily) {
  EXPECT_EQ(eval_slowly_varying(SlowlyVaryingSpec::constant(1.0), 0.37), 1.0);
  EXPECT_EQ(eval_slowly_varying(SlowlyVaryingSpec::constant(2.5), 1e-200), 2.5);
}

TEST(SlowlyVarying, LogPowerAtOne) {
  EXPECT_NEAR(eval_slowly_varying(SlowlyVaryingSpec::log_power(1.0), 1.0), 1.313262, 1e-6);
}

TEST(SlowlyVarying, LogPowerSquaredMatchesExtendedPrecision) {
  const long double e = 2.718281828459045235360287471352662498L;
  const long double ref = std::pow(std::log(e + 100.0L), 2.0L);
  const double got = eval_slowly_varying(SlowlyVaryingSpec::log_power(2.0), 0.01);
  EXPECT_NEAR(got, static_cast<double>(ref), 1e-14 * static_cast<double>(ref));
}

TEST(SlowlyVarying, RejectsBadArguments) {
  const auto s = SlowlyVaryingSpec::log_power(1.0);
  EXPECT_THROW(eval_slowly_varying(s, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(eval_slowly_varying(s, std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(eval_slowly_varying(s, 0.0), DomainError);
  EXPECT_THROW(eval_slowly_varying(s, -1.0), DomainError);
  EXPECT_THROW(SlowlyVaryingSpec::constant(0.0).validate(), DomainError);
}

TEST(TailMass, ConstantEllClosedForm) {
  const RegVaryingTail t{0.5, SlowlyVaryingSpec::constant(1.0), Side::left};
  EXPECT_DOUBLE_EQ(tail_mass(t, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(tail_mass(t, 4.0), 1.0);
}

TEST(TailMass, KaramataRatioExact) {
  for (double a : {0.3, 0.5, 0.7, 1.2, 1.8}) {
    const RegVaryingTail t{a, SlowlyVaryingSpec::constant(1.0), Side::right};
    for (double x : {1.0, 1.5, 10.0, 1e3, 1e6}) EXPECT_NEAR(tail_mass(t, x) * std::pow(x, a) * a, 1.0, 1e-15);
  }
}

TEST(TailMass, LogPowerMatchesIndependentQuadrature) {
  const RegVaryingTail t{0.7, SlowlyVaryingSpec::log_power(1.0), Side::right};
  boost::math::quadrature::exp_sinh<double> es;
  const double ref = es.integrate(
      [](double y) {
        const double u = 2.0 + y;
        return std::pow(u, -1.7) * std::log(std::numbers::e + u);
      },
      1e-14);
  EXPECT_NEAR(tail_mass(t, 2.0), ref, 1e-8 * ref);
}

TEST(TailMass, RejectsInvalidTails) {
  EXPECT_THROW(tail_mass({0.0, SlowlyVaryingSpec::constant(1.0), Side::left}, 1.0), DomainError);
  EXPECT_THROW(tail_mass({-0.5, SlowlyVaryingSpec::constant(1.0), Side::left}, 1.0), DomainError);
  EXPECT_THROW(tail_mass({0.5, SlowlyVaryingSpec::constant(1.0), Side::left}, 0.0), DomainError);
}

TEST(TruncatedMoments, ConstantEll) {
  const RegVaryingTail t{0.7, SlowlyVaryingSpec::constant(1.0), Side::right};
  // int_0^1 u^2 u^{-1.7} du = 1/1.3; int_a^b u u^{-1.7} du
  EXPECT_NEAR(truncated_second_moment(t, 1.0), 1.0 / 1.3, 1e-9);
  const double a = 1e-3, b = 1.0;
  EXPECT_NEAR(truncated_first_moment(t, a, b), (std::pow(b, 0.3) - std::pow(a, 0.3)) / 0.3, 1e-9);
}

TEST(TruncatedMoments, LogPowerAgainstTanhSinh) {
  const RegVaryingTail t{1.3, SlowlyVaryingSpec::log_power(2.0), Side::left};
  boost::math::quadrature::tanh_sinh<double> ts;
  const double ref = ts.integrate(
      [](double u) { return std::pow(u, -0.3) * std::pow(std::log(std::numbers::e + u), 2.0); },
      0.0, 0.5, 1e-13);
  EXPECT_NEAR(truncated_second_moment(t, 0.5), ref, 1e-7 * ref);
}

TEST(Potter, LogPowerLowerBoundHoldsOnGrid) {
  for (double p : {-2.0, -0.5, 0.5, 2.0}) {
    const auto spec = SlowlyVaryingSpec::log_power(p);
    for (double eps : {0.05, 0.1, 0.5}) {
      // Negative powers decay like a power of ln(1/lambda), so the threshold
      // can sit far below 1e-8.
      const double lambda_min = p < 0.0 ? 1e-300 : 1e-8;
      const auto lambda0 = potter_lower_threshold(spec, eps, lambda_min);
      ASSERT_TRUE(lambda0.has_value()) << "p=" << p << " eps=" << eps;
      for (double lam = lambda_min; lam < *lambda0; lam *= 1.5)
        EXPECT_GE(eval_slowly_varying(spec, lam), std::pow(lam, eps));
    }
  }
}

TEST(SlowlyVaryingLimit, ThresholdReported) {
  for (double lambda : {0.5, 2.0}) {
    const auto spec = SlowlyVaryingSpec::log_power(1.0);
    const auto x0 = slowly_varying_threshold(spec, lambda);
    ASSERT_TRUE(x0.has_value());
    EXPECT_LT(*x0, 1.0);
    for (double x = 1e-300; x <= *x0; x *= 10.0)
      EXPECT_LT(std::abs(eval_slowly_varying(spec, lambda * x) / eval_slowly_varying(spec, x) - 1.0), 0.01);
    EXPECT_EQ(*slowly_varying_threshold(SlowlyVaryingSpec::constant(3.0), lambda), 1.0);
  }
}

TEST(RegVaryingTail, DensityShape) {
  const RegVaryingTail t{0.5, SlowlyVaryingSpec::log_power(1.0), Side::left};
  EXPECT_NEAR(t.density(2.0), std::pow(2.0, -1.5) * std::log(std::numbers::e + 2.0), 1e-15);
}
