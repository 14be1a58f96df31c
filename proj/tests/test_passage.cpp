#include <gtest/gtest.h>

#include <cmath>

#include "levyfp/passage.hpp"
#include "levyfp/simulate.hpp"

using namespace levyfp;

namespace {
PathSample constant_path(std::vector<double> times, double value) {
  PathSample p;
  p.values.assign(times.size(), value);
  p.values[0] = 0.0;
  p.times = std::move(times);
  return p;
}
}  // namespace

TEST(BoundaryValue, Examples) {
  EXPECT_EQ(boundary_value(Boundary::decreasing(1.0, 1.0), 1.0), 0.0);
  EXPECT_EQ(boundary_value(Boundary::decreasing(1.0, 1.0), 0.0), 1.0);
  EXPECT_EQ(boundary_value(Boundary::increasing(0.5, 1.0), 4.0), 3.0);
  EXPECT_THROW(boundary_value(Boundary::constant(), -1.0), DomainError);
}

TEST(Survives, ZeroPathBelowDecreasingBoundary) {
  const auto path = constant_path({0.0, 0.5, 1.0, 1.5, 2.0}, 0.0);
  const auto v = survives(path, Boundary::decreasing(1.0, 1.0));
  EXPECT_FALSE(v.survived);
  ASSERT_TRUE(v.first_crossing_index.has_value());
  EXPECT_EQ(*v.first_crossing_index, 3u);  // t = 1 is a tie and survives
  EXPECT_TRUE(survives(path, Boundary::constant(1.0)).survived);
  EXPECT_FALSE(survives(path, Boundary::constant(1.0)).first_crossing_index.has_value());
}

TEST(Survives, DriftBelowIncreasingBoundary) {
  const auto path = sample_path(LevyModel::brownian(0.0, 1.0), TimeGrid::uniform(2.0, 0.01), {1, 0, 0});
  EXPECT_TRUE(survives(path, Boundary::increasing(2.0, 1.0)).survived);
}

TEST(Survives, UntilHorizon) {
  const auto path = constant_path({0.0, 1.0, 2.0, 3.0}, 0.5);
  EXPECT_TRUE(survives_until(path, Boundary::decreasing(1.0, 1.0), 0.5).survived);
  EXPECT_FALSE(survives_until(path, Boundary::decreasing(1.0, 1.0), 3.0).survived);
}

TEST(Survives, DominanceAndNestingOnRandomPaths) {
  const auto model = LevyModel::strictly_stable({0.7, 0.0, 1.0});
  const ProcessSimulator sim(model);
  const auto grid = TimeGrid::geometric(200.0, 1e-3);
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const auto path = sample_path(sim, grid, {2, i, 0});
    for (double g : {0.5, 1.0, 1.3}) {
      const bool dec = survives(path, Boundary::decreasing(g, 1.0)).survived;
      const bool con = survives(path, Boundary::constant(1.0)).survived;
      const bool inc = survives(path, Boundary::increasing(g, 1.0)).survived;
      ASSERT_TRUE(!dec || con);
      ASSERT_TRUE(!con || inc);
    }
    bool prev = false;
    for (double T : {200.0, 100.0, 10.0, 1.0}) {
      const bool s = survives_until(path, Boundary::constant(1.0), T).survived;
      ASSERT_TRUE(!prev || s);
      prev = s;
    }
  }
}

TEST(IntegralTest, ClosedForms) {
  const auto one = brownian_integral_test(Boundary::constant(1.0));
  EXPECT_EQ(*one.classification, IntegralClass::convergent);
  EXPECT_DOUBLE_EQ(one.value, 2.0);
  const auto quarter = brownian_integral_test(Boundary::increasing(0.25, 0.0));
  EXPECT_EQ(*quarter.classification, IntegralClass::convergent);
  EXPECT_NEAR(quarter.value, 4.0, 1e-14);
  const auto half = brownian_integral_test(Boundary::increasing(0.5, 0.0));
  EXPECT_EQ(*half.classification, IntegralClass::divergent);
  EXPECT_TRUE(std::isinf(half.value));
  // 1 + t^{1/4}: 2 + 4
  EXPECT_NEAR(brownian_integral_test(Boundary::increasing(0.25, 1.0)).value, 6.0, 1e-14);
  // |1 - t^{1/4}| = t^{1/4} - 1 on [1, inf): 4 - 2
  EXPECT_NEAR(brownian_integral_test(Boundary::decreasing(0.25, 1.0)).value, 2.0, 1e-14);
}

TEST(IntegralTest, SignChangeMatchesQuadrature) {
  // |3 - t^{1/4}| changes sign at t = 81.
  const auto b = Boundary::decreasing(0.25, 3.0);
  TabulatedBoundary tab;
  for (double s = 0.0; s <= std::log(1e16); s += 1e-4) {
    const double t = std::exp(s);
    tab.t.push_back(t);
    tab.f.push_back(b(t));
  }
  tab.envelope_exponent = 0.25;
  const auto closed = brownian_integral_test(b);
  const auto numeric = brownian_integral_test(tab);
  EXPECT_FALSE(numeric.closed_form);
  EXPECT_NEAR(numeric.value, closed.value, 1e-4 * closed.value);
}

TEST(IntegralTest, UnknownEnvelopeRefusesToClassify) {
  TabulatedBoundary tab{{1.0, 2.0, 4.0}, {1.0, 1.0, 1.0}, std::nullopt};
  const auto r = brownian_integral_test(tab);
  EXPECT_FALSE(r.classification.has_value());
  EXPECT_GT(r.value, 0.0);
  EXPECT_THROW(brownian_integral_test(TabulatedBoundary{{1.0}, {1.0}, 0.0}), DomainError);
}
