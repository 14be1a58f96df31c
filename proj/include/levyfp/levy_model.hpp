#pragma once

// Lévy triplet (b, sigma^2, nu) with domain-of-attraction metadata.

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levyfp/errors.hpp"
#include "levyfp/quadrature.hpp"
#include "levyfp/rvcalc.hpp"
#include "levyfp/stable.hpp"

namespace levyfp {

enum class SimMode { exact, perturbed };

inline const char* to_string(SimMode mode) { return mode == SimMode::exact ? "exact" : "perturbed"; }

struct LevyModel {
  double b = 0.0;
  double sigma2 = 0.0;
  std::optional<RegVaryingTail> tail_left;
  std::optional<RegVaryingTail> tail_right;
  std::optional<StableParams> stable;
  std::optional<double> rho;  // supplied positivity parameter; wins over the closed form
  SimMode mode = SimMode::perturbed;
  double eta = 1e-3;  // small-jump cutoff of the perturbed simulation

  /// Strictly stable process: tails with constant ell matching the stable Lévy
  /// density and the drift that makes the triplet strictly stable.
  static LevyModel strictly_stable(const StableParams& params) {
    params.validate();
    LevyModel m;
    m.stable = params;
    m.mode = SimMode::exact;
    const auto dens = stable_levy_density(params);
    if (dens.c_minus > 0.0)
      m.tail_left = RegVaryingTail{params.alpha, SlowlyVaryingSpec::constant(dens.c_minus), Side::left};
    if (dens.c_plus > 0.0)
      m.tail_right = RegVaryingTail{params.alpha, SlowlyVaryingSpec::constant(dens.c_plus), Side::right};
    m.b = stable_drift(params);
    return m;
  }

  static LevyModel brownian(double sigma2, double drift = 0.0) {
    LevyModel m;
    m.sigma2 = sigma2;
    m.b = drift;
    return m;
  }

  /// Both tails with the same alpha and ell (possibly asymmetric weights).
  static LevyModel two_sided(double alpha, const SlowlyVaryingSpec& left,
                             const SlowlyVaryingSpec& right) {
    LevyModel m;
    m.tail_left = RegVaryingTail{alpha, left, Side::left};
    m.tail_right = RegVaryingTail{alpha, right, Side::right};
    return m;
  }

  /// Drift b in the compensated triplet of a strictly stable law.
  static double stable_drift(const StableParams& params) {
    if (params.alpha == 1.0) return 0.0;
    const auto dens = stable_levy_density(params);
    const double diff = dens.c_plus - dens.c_minus;
    if (params.alpha < 1.0) return diff / (1.0 - params.alpha);
    return -diff / (params.alpha - 1.0);
  }

  /// Index of the domain of attraction.
  double alpha() const {
    if (stable) return stable->alpha;
    if (tail_left && tail_right) return std::min(tail_left->alpha, tail_right->alpha);
    if (tail_left) return tail_left->alpha;
    if (tail_right) return tail_right->alpha;
    if (sigma2 > 0.0) return 2.0;
    throw DomainError("model carries no domain-of-attraction metadata");
  }

  const std::optional<RegVaryingTail>& tail(Side side) const {
    return side == Side::left ? tail_left : tail_right;
  }

  /// Stable parameters implied by the tails when both carry constant ell.
  std::optional<StableParams> implied_stable() const {
    if (stable) return stable;
    const double a = tail_left ? tail_left->alpha : (tail_right ? tail_right->alpha : 0.0);
    if (a <= 0.0) return std::nullopt;
    if ((tail_left && (tail_left->alpha != a || !tail_left->ell.is_constant())) ||
        (tail_right && (tail_right->alpha != a || !tail_right->ell.is_constant())))
      return std::nullopt;
    const double cm = tail_left ? tail_left->ell.c : 0.0;
    const double cp = tail_right ? tail_right->ell.c : 0.0;
    if (a == 1.0) {
      if (cm != cp) return std::nullopt;
      return StableParams{1.0, 0.0, cp * std::numbers::pi};
    }
    const double factor = -std::tgamma(-a) * std::cos(std::numbers::pi * a / 2.0);
    const double scale = std::pow(factor * (cp + cm), 1.0 / a);
    return StableParams{a, (cp - cm) / (cp + cm), scale};
  }

  /// Closed-form positivity parameter when available.
  std::optional<double> closed_form_rho() const {
    if (sigma2 > 0.0 && !stable && !tail_left && !tail_right) return 0.5;
    const auto st = implied_stable();
    if (!st) return std::nullopt;
    try {
      return positivity_parameter(*st);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  /// Supplied rho wins over the closed form.
  std::optional<double> effective_rho() const { return rho ? rho : closed_form_rho(); }
};

/// Moving boundary f(t) = level, level - t^gamma or level + t^gamma.
enum class BoundaryKind { constant, decreasing, increasing };

inline const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::constant: return "constant";
    case BoundaryKind::decreasing: return "decreasing";
    case BoundaryKind::increasing: return "increasing";
  }
  return "constant";
}

struct Boundary {
  BoundaryKind kind = BoundaryKind::constant;
  double gamma = 1.0;
  double level = 1.0;

  static Boundary constant(double level = 1.0) { return {BoundaryKind::constant, 0.0, level}; }
  static Boundary decreasing(double gamma, double level = 1.0) {
    return {BoundaryKind::decreasing, gamma, level};
  }
  static Boundary increasing(double gamma, double level = 1.0) {
    return {BoundaryKind::increasing, gamma, level};
  }

  double operator()(double t) const {
    switch (kind) {
      case BoundaryKind::constant: return level;
      case BoundaryKind::decreasing: return level - std::pow(t, gamma);
      case BoundaryKind::increasing: return level + std::pow(t, gamma);
    }
    return level;
  }

  friend bool operator==(const Boundary&, const Boundary&) = default;
};

namespace detail {

/// Real part of the jump integral of one tail: integral over r > 0 of
/// (cos(u r) - 1) nu(dr), for u > 0.
inline double tail_cos_part(const RegVaryingTail& tail, double u, double fourier_tol) {
  auto near = [&](double r) {
    const double h = std::sin(u * r / 2.0);
    return -2.0 * h * h * tail.density(r);
  };
  const double inner = quad::integrate_from_zero(near, 1.0);
  // integral over r > 1 of cos(u r) f(r) = cos u * C(u) - sin u * S(u) with
  // C, S the Fourier integrals of f(1 + y) over y > 0.
  auto shifted = [&](double y) { return tail.density(1.0 + y); };
  boost::math::quadrature::ooura_fourier_cos<double> fcos(fourier_tol);
  boost::math::quadrature::ooura_fourier_sin<double> fsin(fourier_tol);
  const double c = fcos.integrate(shifted, u).first;
  const double s = fsin.integrate(shifted, u).first;
  const double outer = std::cos(u) * c - std::sin(u) * s - tail_mass(tail, 1.0);
  return inner + outer;
}

/// Imaginary part for the right half-line: integral over r > 0 of
/// (sin(u r) - u r 1{r <= 1}) nu(dr), for u > 0.
inline double tail_sin_part(const RegVaryingTail& tail, double u, double fourier_tol) {
  auto near = [&](double r) {
    const double z = u * r;
    const double d = std::abs(z) < 1e-2
                         ? -z * z * z / 6.0 * (1.0 - z * z / 20.0 * (1.0 - z * z / 42.0))
                         : std::sin(z) - z;
    return d * tail.density(r);
  };
  const double inner = quad::integrate_from_zero(near, 1.0);
  auto shifted = [&](double y) { return tail.density(1.0 + y); };
  boost::math::quadrature::ooura_fourier_cos<double> fcos(fourier_tol);
  boost::math::quadrature::ooura_fourier_sin<double> fsin(fourier_tol);
  const double c = fcos.integrate(shifted, u).first;
  const double s = fsin.integrate(shifted, u).first;
  const double outer = std::sin(u) * c + std::cos(u) * s;
  return inner + outer;
}

}  // namespace detail

inline constexpr double kFourierTol = 1e-10;

/// Psi(u) with ln E exp(iuX(t)) = t Psi(u).
inline std::complex<double> characteristic_exponent(const LevyModel& model, double u,
                                                    double fourier_tol = kFourierTol) {
  for (const auto* t : {&model.tail_left, &model.tail_right})
    if (*t && !((*t)->alpha < 2.0)) throw DomainError("compensator not integrable for alpha >= 2");
  if (u == 0.0) return {0.0, 0.0};
  const double v = std::abs(u);
  double re = -0.5 * model.sigma2 * v * v;
  double im = model.b * v;
  // Sides are evaluated by identical code so that symmetric models cancel exactly.
  double re_left = 0.0, re_right = 0.0, im_left = 0.0, im_right = 0.0;
  if (model.tail_left) {
    re_left = detail::tail_cos_part(*model.tail_left, v, fourier_tol);
    im_left = detail::tail_sin_part(*model.tail_left, v, fourier_tol);
  }
  if (model.tail_right) {
    re_right = detail::tail_cos_part(*model.tail_right, v, fourier_tol);
    im_right = detail::tail_sin_part(*model.tail_right, v, fourier_tol);
  }
  re += re_left + re_right;
  im += im_right - im_left;
  const std::complex<double> psi{re, im};
  return u > 0.0 ? psi : std::conj(psi);
}

/// Integral of (1 ^ x^2) over one tail.
inline double levy_integrability(const RegVaryingTail& tail) {
  return truncated_second_moment(tail, 1.0) + tail_mass(tail, 1.0);
}

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& needle) const {
    for (const auto& v : violations)
      if (v.message.find(needle) != std::string::npos) return true;
    return false;
  }
};

inline constexpr double kRhoAgreementTol = 1e-6;

/// Collects every violated invariant; never throws.
inline ValidationReport validate_model(const LevyModel& model, bool theorem_mode = false) {
  ValidationReport report;
  auto violate = [&](std::string field, std::string msg) {
    report.violations.push_back({std::move(field), std::move(msg)});
  };

  if (!(model.sigma2 >= 0.0)) violate("sigma2", "sigma2 negative");
  if (!std::isfinite(model.b)) violate("b", "drift not finite");
  if (!(model.eta > 0.0 && model.eta < 1.0)) violate("eta", "small-jump cutoff must lie in (0, 1)");

  const bool has_tail = model.tail_left.has_value() || model.tail_right.has_value();
  if (!model.stable && !has_tail && !(model.sigma2 > 0.0) && model.b == 0.0)
    violate("model", "model is identically zero");

  if (model.stable) {
    try {
      model.stable->validate();
    } catch (const std::exception& e) {
      violate("stable", e.what());
    }
  }
  if (model.mode == SimMode::exact && !model.stable)
    violate("mode", "exact simulation mode requires stable parameters");

  for (const auto* t : {&model.tail_left, &model.tail_right}) {
    if (!*t) continue;
    const std::string field = std::string("tail_") + to_string((*t)->side);
    try {
      (*t)->validate();
      const double mass = levy_integrability(**t);
      if (!std::isfinite(mass)) violate(field, "Lévy integrability fails: integral of (1 ^ x^2) nu(dx) is infinite");
    } catch (const std::exception& e) {
      violate(field, e.what());
    }
    if (model.stable && (*t)->alpha != model.stable->alpha)
      violate(field, "tail index differs from the stable index");
  }

  const auto closed = model.closed_form_rho();
  if (model.rho) {
    if (!(*model.rho >= 0.0 && *model.rho <= 1.0)) violate("rho", "rho outside [0, 1]");
    if (closed && std::abs(*closed - *model.rho) > kRhoAgreementTol) {
      std::ostringstream msg;
      msg << "supplied rho " << *model.rho << " disagrees with closed form " << *closed;
      report.warnings.push_back(msg.str());
    }
  }

  if (theorem_mode) {
    double alpha = 0.0;
    try {
      alpha = model.alpha();
    } catch (const std::exception&) {
      alpha = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(alpha < 1.0)) violate("alpha", "theorem verification requires alpha < 1");
    const auto r = model.effective_rho();
    if (!r || !(*r > 0.0 && *r < 1.0)) violate("rho", "theorem verification requires rho in (0, 1)");
  }
  return report;
}

/// c(t) = scale * t^{1/alpha}.
inline double norming_function(const LevyModel& model, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("norming function requires t > 0");
  if (const auto st = model.implied_stable()) return st->scale * std::pow(t, 1.0 / st->alpha);
  // Regularly varying ell: use its multiplier as the scale constant.
  const double a = model.alpha();
  if (a == 2.0) return std::sqrt(model.sigma2 * t);
  double c = 0.0;
  if (model.tail_left) c += model.tail_left->ell.c;
  if (model.tail_right) c += model.tail_right->ell.c;
  const double factor = -std::tgamma(-a) * std::cos(std::numbers::pi * a / 2.0);
  return std::pow(factor * c, 1.0 / a) * std::pow(t, 1.0 / a);
}

}  // namespace levyfp
