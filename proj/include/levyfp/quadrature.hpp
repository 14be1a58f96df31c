#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyfp/errors.hpp"

namespace levyfp::quad {

inline constexpr double kRelTol = 1e-8;
inline constexpr double kTailCutoff = 1e-16;

/// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = kRelTol) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &error);
  if (!std::isfinite(value)) throw DomainError("quadrature produced a non-finite value");
  return value;
}

/// Length in s of the window [0, s_max] after which g(s) stays below
/// kTailCutoff times its size near the left endpoint. g must eventually decay.
template <class G>
double decay_window(G&& g, double s_start = 8.0) {
  double g0 = 0.0;
  for (double s : {0.0, 0.25, 0.5, 1.0, 2.0}) g0 = std::max(g0, std::abs(g(s)));
  if (g0 == 0.0) return s_start;
  double s = s_start;
  while (std::abs(g(s)) >= kTailCutoff * g0) {
    s *= 2.0;
    if (s > 1e6) throw DomainError("integrand does not decay; integral diverges");
  }
  return s;
}

/// Integral of f over [x, inf) using u = x e^s. Heavy polynomial tails turn
/// into exponential decay in s, which the cutoff rule handles cleanly.
template <class F>
double integrate_to_infinity(F&& f, double x, double rel_tol = kRelTol) {
  if (!(x > 0.0)) throw DomainError("integrate_to_infinity requires x > 0");
  auto g = [&](double s) {
    const double u = x * std::exp(s);
    return f(u) * u;
  };
  const double s_max = decay_window(g);
  // Split into octaves so the adaptive rule sees a well-scaled piece each time.
  double total = 0.0;
  double lo = 0.0;
  double width = 1.0;
  while (lo < s_max) {
    const double hi = std::min(s_max, lo + width);
    total += integrate(g, lo, hi, rel_tol);
    lo = hi;
    width *= 2.0;
  }
  return total;
}

/// Integral of f over (0, x] using u = x e^{-s}; for integrands that are
/// integrable singular or vanishing at zero.
template <class F>
double integrate_from_zero(F&& f, double x, double rel_tol = kRelTol) {
  if (!(x > 0.0)) throw DomainError("integrate_from_zero requires x > 0");
  auto g = [&](double s) {
    const double u = x * std::exp(-s);
    return f(u) * u;
  };
  const double s_max = decay_window(g);
  double total = 0.0;
  double lo = 0.0;
  double width = 1.0;
  while (lo < s_max) {
    const double hi = std::min(s_max, lo + width);
    total += integrate(g, lo, hi, rel_tol);
    lo = hi;
    width *= 2.0;
  }
  return total;
}

}  // namespace levyfp::quad
