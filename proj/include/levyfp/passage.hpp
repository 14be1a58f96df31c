#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "levyfp/errors.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/simulate.hpp"

namespace levyfp {

inline double boundary_value(const Boundary& b, double t) {
  if (!(t >= 0.0)) throw DomainError("boundary evaluated at negative time");
  return b(t);
}

struct SurvivalVerdict {
  bool survived = true;
  std::optional<std::size_t> first_crossing_index;
};

/// Survival iff X(t) <= f(t) at every monitored point (ties survive).
inline SurvivalVerdict survives(const PathSample& path, const Boundary& b) {
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    if (!(path.values[k] <= b(path.times[k]))) return {false, k};
  }
  return {true, std::nullopt};
}

/// Same test restricted to monitored points with t <= horizon.
inline SurvivalVerdict survives_until(const PathSample& path, const Boundary& b, double horizon) {
  for (std::size_t k = 0; k < path.times.size() && path.times[k] <= horizon; ++k) {
    if (!(path.values[k] <= b(path.times[k]))) return {false, k};
  }
  return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Integral test for Brownian motion: integral over [1, inf) of |f(t)| t^{-3/2}.

enum class IntegralClass { convergent, divergent };

inline const char* to_string(IntegralClass c) {
  return c == IntegralClass::convergent ? "convergent" : "divergent";
}

struct IntegralTestResult {
  std::optional<IntegralClass> classification;  // empty: envelope unknown
  double value;                                  // +inf when divergent
  bool closed_form;
};

/// Boundary sampled on a table; the envelope exponent (|f| ~ t^g) enables
/// classification.
struct TabulatedBoundary {
  std::vector<double> t;
  std::vector<double> f;
  std::optional<double> envelope_exponent;
};

namespace detail {
/// Integral over [a, b] of t^{p}, b may be +inf (requires p < -1 then).
inline double power_integral(double p, double a, double b) {
  if (std::isinf(b)) return -std::pow(a, p + 1.0) / (p + 1.0);
  if (std::abs(p + 1.0) < 1e-15) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}
}  // namespace detail

inline IntegralTestResult brownian_integral_test(const Boundary& b) {
  const double inf = std::numeric_limits<double>::infinity();
  const double L = b.level;
  if (b.kind == BoundaryKind::constant) {
    return {IntegralClass::convergent, 2.0 * std::abs(L), true};
  }
  const double g = b.gamma;
  if (g >= 0.5) return {IntegralClass::divergent, inf, true};
  const double p = g - 1.5;  // t^gamma * t^{-3/2}
  double value = 0.0;
  if (b.kind == BoundaryKind::increasing) {
    // |L + t^g| on [1, inf): sign change at t* = (-L)^{1/g} when L < -1.
    if (L >= -1.0) {
      value = L * detail::power_integral(-1.5, 1.0, inf) + detail::power_integral(p, 1.0, inf);
    } else {
      const double ts = std::pow(-L, 1.0 / g);
      value = -(L * detail::power_integral(-1.5, 1.0, ts) + detail::power_integral(p, 1.0, ts)) +
              (L * detail::power_integral(-1.5, ts, inf) + detail::power_integral(p, ts, inf));
    }
  } else {
    // |L - t^g|: t^g - L on [1, inf) when L <= 1, sign change at L^{1/g} otherwise.
    if (L <= 1.0) {
      value = detail::power_integral(p, 1.0, inf) - L * detail::power_integral(-1.5, 1.0, inf);
    } else {
      const double ts = std::pow(L, 1.0 / g);
      value = (L * detail::power_integral(-1.5, 1.0, ts) - detail::power_integral(p, 1.0, ts)) +
              (detail::power_integral(p, ts, inf) - L * detail::power_integral(-1.5, ts, inf));
    }
  }
  return {IntegralClass::convergent, value, true};
}

/// Trapezoid rule over the table restricted to [1, t_max]; with a known
/// envelope exponent the tail beyond t_max is added from the power envelope
/// fitted to the last sample.
inline IntegralTestResult brownian_integral_test(const TabulatedBoundary& tab) {
  if (tab.t.size() != tab.f.size() || tab.t.size() < 2)
    throw DomainError("tabulated boundary needs matching t and f with at least two points");
  double partial = 0.0;
  for (std::size_t k = 1; k < tab.t.size(); ++k) {
    const double a = std::max(1.0, tab.t[k - 1]);
    const double b = tab.t[k];
    if (b <= a) continue;
    auto h = [&](std::size_t i) { return std::abs(tab.f[i]) * std::pow(tab.t[i], -1.5); };
    partial += 0.5 * (h(k - 1) + h(k)) * (b - a);
  }
  if (!tab.envelope_exponent) return {std::nullopt, partial, false};
  const double g = *tab.envelope_exponent;
  if (g >= 0.5) return {IntegralClass::divergent, std::numeric_limits<double>::infinity(), false};
  const double t_last = tab.t.back();
  const double amp = std::abs(tab.f.back()) / std::pow(t_last, g);
  const double tail = amp * detail::power_integral(g - 1.5, t_last, std::numeric_limits<double>::infinity());
  return {IntegralClass::convergent, partial + tail, false};
}

}  // namespace levyfp
