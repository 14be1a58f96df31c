#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "levyfp/levy_model.hpp"
#include "levyfp/simulate.hpp"
#include "levyfp/stable.hpp"
#include "levyfp/stats.hpp"

using namespace levyfp;

namespace {
double fraction_at_most(const std::vector<double>& xs, double x) {
  return static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double v) { return v <= x; })) /
         static_cast<double>(xs.size());
}
}  // namespace

TEST(StableSampler, CauchySymmetryAndCdf) {
  const auto xs = sample_stable({1.0, 0.0, 1.0}, 1000000, {11, 0, stream_tag::kDirectStable});
  EXPECT_NEAR(fraction_at_most(xs, 0.0), 0.5, 0.002);
  EXPECT_NEAR(fraction_at_most(xs, 1.0), 0.75, 0.002);
}

TEST(StableSampler, OneSidedForBetaOne) {
  for (double a : {0.3, 0.5, 0.9}) {
    const auto xs = sample_stable({a, 1.0, 1.0}, 100000, {12, 0, stream_tag::kDirectStable});
    for (double x : xs) ASSERT_GT(x, 0.0) << "alpha=" << a;
  }
}

TEST(StableSampler, RejectsInvalidInput) {
  EXPECT_THROW(sample_stable({0.5, 0.0, 1.0}, 0, {}), DomainError);
  EXPECT_THROW(sample_stable({2.0, 0.0, 1.0}, 10, {}), DomainError);
  EXPECT_THROW(sample_stable({0.0, 0.0, 1.0}, 10, {}), DomainError);
  EXPECT_THROW(sample_stable({1.0, 0.5, 1.0}, 10, {}), Unsupported);
}

TEST(StableSampler, Deterministic) {
  const StreamId id{3, 17, stream_tag::kDirectStable};
  EXPECT_EQ(sample_stable({0.7, 0.3, 2.0}, 1000, id), sample_stable({0.7, 0.3, 2.0}, 1000, id));
}

TEST(PositivityParameter, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(positivity_parameter({0.7, 0.0, 1.0}), 0.5);
  EXPECT_NEAR(positivity_parameter({0.5, 1.0, 1.0}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(positivity_parameter({1.0, 0.0, 1.0}), 0.5);
  EXPECT_THROW(positivity_parameter({1.0, 0.2, 1.0}), Unsupported);
}

TEST(PositivityParameter, MatchesSamplingFrequency) {
  const StableParams p{0.7, 0.5, 1.0};
  const std::size_t n = 1000000;
  const auto xs = sample_stable(p, n, {13, 0, stream_tag::kDirectStable});
  const double freq = 1.0 - fraction_at_most(xs, 0.0);
  const double rho = positivity_parameter(p);
  EXPECT_NEAR(freq, rho, 3.0 * stats::binomial_se(rho, n));
}

TEST(PositivityParameter, ReflectionIdentityExact) {
  for (double a = 0.05; a < 2.0; a += 0.05) {
    if (std::abs(a - 1.0) < 1e-9) continue;
    for (double b = -1.0; b <= 1.0; b += 0.125) {
      const double r = positivity_parameter({a, b, 1.0});
      const double m = positivity_parameter({a, -b, 1.0});
      ASSERT_EQ(m, 1.0 - r) << "alpha=" << a << " beta=" << b;
    }
  }
}

TEST(NormingFunction, Examples) {
  EXPECT_DOUBLE_EQ(norming_function(LevyModel::strictly_stable({0.5, 0.0, 1.0}), 4.0), 16.0);
  EXPECT_DOUBLE_EQ(norming_function(LevyModel::strictly_stable({1.0, 0.0, 2.0}), 3.0), 6.0);
  EXPECT_THROW(norming_function(LevyModel::strictly_stable({0.5, 0.0, 1.0}), 0.0), DomainError);
}

TEST(NormingFunction, ScaledProcessMatchesUnitLaw) {
  const auto model = LevyModel::strictly_stable({0.7, 0.0, 1.0});
  const ProcessSimulator sim(model);
  const auto grid = TimeGrid::from_points({0.0, 1024.0});
  const double c = norming_function(model, 1024.0);
  const std::size_t n = 100000;
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = sample_path(sim, grid, {21, i, 0}).values.back() / c;
  const auto direct = sample_stable({0.7, 0.0, 1.0}, n, {22, 0, stream_tag::kDirectStable});
  EXPECT_LT(stats::ks_two_sample(scaled, direct), 0.02);
}

TEST(SelfSimilarity, KolmogorovSmirnov) {
  const std::size_t n = 100000;
  for (double a : {0.5, 0.7, 1.5}) {
    const StableParams p{a, 0.3, 1.0};
    const auto base = sample_stable(p, n, {31, 0, stream_tag::kDirectStable});
    for (double c : {2.0, 8.0}) {
      // Z(ct) / c^{1/alpha} with t = 1, Z(c) drawn as a sum of c unit increments.
      StableSampler s(p);
      RngStream rng(StreamId{32, static_cast<std::uint64_t>(c), stream_tag::kDirectStable});
      std::vector<double> scaled(n);
      for (auto& v : scaled) {
        double sum = 0.0;
        for (int k = 0; k < static_cast<int>(c); ++k) sum += s(rng);
        v = sum / std::pow(c, 1.0 / a);
      }
      EXPECT_LT(stats::ks_two_sample(scaled, base), stats::ks_critical_1pct(n, n)) << "alpha=" << a << " c=" << c;
    }
  }
}

TEST(StableLevyDensity, ConsistentWithCharacteristicExponent) {
  // The tails with these constants reproduce the closed-form exponent.
  for (double a : {0.4, 0.8, 1.4}) {
    const StableParams p{a, -0.4, 1.3};
    const auto model = LevyModel::strictly_stable(p);
    for (double u : {0.3, 1.0, 2.5}) {
      const auto psi = characteristic_exponent(model, u);
      const auto ref = stable_characteristic_exponent(p, u);
      EXPECT_NEAR(psi.real(), ref.real(), 1e-7 * std::abs(ref));
      EXPECT_NEAR(psi.imag(), ref.imag(), 1e-7 * std::abs(ref));
    }
  }
}
