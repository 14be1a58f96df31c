#pragma once

// Slowly varying functions at zero and the regularly varying Lévy tails built
// from them: nu(dx) = |x|^{-alpha-1} ell(1/|x|) dx on one half-line.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "levyfp/errors.hpp"
#include "levyfp/quadrature.hpp"

namespace levyfp {

enum class EllFamily { constant, log_power };

/// ell(x) = c for the constant family, c * (ln(e + 1/x))^p for log-power.
struct SlowlyVaryingSpec {
  EllFamily family = EllFamily::constant;
  double c = 1.0;
  double p = 0.0;

  static SlowlyVaryingSpec constant(double c) { return {EllFamily::constant, c, 0.0}; }
  static SlowlyVaryingSpec log_power(double p, double c = 1.0) {
    return {EllFamily::log_power, c, p};
  }

  bool is_constant() const { return family == EllFamily::constant || p == 0.0; }

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("slowly varying multiplier c must be > 0");
    if (!std::isfinite(p)) throw DomainError("log-power exponent must be finite");
  }

  friend bool operator==(const SlowlyVaryingSpec&, const SlowlyVaryingSpec&) = default;
};

inline double eval_slowly_varying(const SlowlyVaryingSpec& spec, double x) {
  if (!std::isfinite(x)) throw DomainError("slowly varying function evaluated at non-finite x");
  if (!(x > 0.0)) throw DomainError("slowly varying function requires x > 0");
  switch (spec.family) {
    case EllFamily::constant:
      return spec.c;
    case EllFamily::log_power:
      return spec.c * std::pow(std::log(std::numbers::e + 1.0 / x), spec.p);
  }
  return spec.c;
}

enum class Side { left, right };

inline const char* to_string(Side side) { return side == Side::left ? "left" : "right"; }

struct RegVaryingTail {
  double alpha = 0.5;
  SlowlyVaryingSpec ell;
  Side side = Side::left;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("tail index alpha must lie in (0, 2)");
    ell.validate();
  }

  /// Lévy density at distance r = |x| > 0 on this tail's half-line.
  double density(double r) const {
    return std::pow(r, -alpha - 1.0) * eval_slowly_varying(ell, 1.0 / r);
  }

  friend bool operator==(const RegVaryingTail&, const RegVaryingTail&) = default;
};

/// nu_+(x) or nu_-(x): the tail mass beyond distance x.
inline double tail_mass(const RegVaryingTail& tail, double x) {
  if (!(tail.alpha > 0.0)) throw DomainError("tail mass diverges for alpha <= 0");
  if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("tail mass requires finite x > 0");
  if (tail.ell.is_constant()) return tail.ell.c * std::pow(x, -tail.alpha) / tail.alpha;
  return quad::integrate_to_infinity([&](double u) { return tail.density(u); }, x);
}

/// Truncated second moment over (0, x]: integral of r^2 nu(dr).
inline double truncated_second_moment(const RegVaryingTail& tail, double x) {
  if (!(tail.alpha < 2.0)) throw DomainError("second moment near zero diverges for alpha >= 2");
  if (tail.ell.is_constant())
    return tail.ell.c * std::pow(x, 2.0 - tail.alpha) / (2.0 - tail.alpha);
  return quad::integrate_from_zero([&](double u) { return u * u * tail.density(u); }, x);
}

/// Truncated first moment over (a, b]: integral of r nu(dr).
inline double truncated_first_moment(const RegVaryingTail& tail, double a, double b) {
  if (!(a > 0.0) || !(b >= a)) throw DomainError("truncated first moment requires 0 < a <= b");
  if (tail.ell.is_constant()) {
    const double k = 1.0 - tail.alpha;
    if (std::abs(k) < 1e-14) return tail.ell.c * std::log(b / a);
    return tail.ell.c * (std::pow(b, k) - std::pow(a, k)) / k;
  }
  return quad::integrate([&](double s) {
    const double u = a * std::exp(s);
    return u * u * tail.density(u);
  }, 0.0, std::log(b / a));
}

/// Largest grid point x0 in a geometric grid from 1 down to 1e-300 such that
/// |ell(lambda x)/ell(x) - 1| < tol for every grid point x <= x0. Empty when
/// the condition fails at the smallest grid point.
inline std::optional<double> slowly_varying_threshold(const SlowlyVaryingSpec& spec, double lambda,
                                                      double tol = 0.01) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  std::vector<double> grid;
  for (int k = 0; k <= 600; ++k) grid.push_back(std::pow(10.0, -0.5 * k));
  std::optional<double> x0;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const double x = *it;
    const double ratio = eval_slowly_varying(spec, lambda * x) / eval_slowly_varying(spec, x);
    if (std::abs(ratio - 1.0) < tol) {
      x0 = x;
    } else {
      break;
    }
  }
  return x0;
}

/// Largest lambda0 on the geometric grid {10^{-k/4}} down to lambda_min such
/// that ell(lambda) >= lambda^eps holds at every grid point below it.
inline std::optional<double> potter_lower_threshold(const SlowlyVaryingSpec& spec, double eps,
                                                    double lambda_min = 1e-8) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  std::optional<double> lambda0;
  const int k_max = static_cast<int>(std::ceil(-4.0 * std::log10(lambda_min)));
  for (int k = k_max; k >= 1; --k) {
    const double lambda = std::pow(10.0, -0.25 * k);
    if (eval_slowly_varying(spec, lambda) >= std::pow(lambda, eps)) {
      lambda0 = lambda;
    } else {
      break;
    }
  }
  return lambda0;
}

}  // namespace levyfp
