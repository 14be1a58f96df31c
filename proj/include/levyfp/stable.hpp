#pragma once

// Strictly stable laws in the parameterization
//   E exp(iuZ) = exp(-scale^alpha |u|^alpha (1 - i beta sgn(u) tan(pi alpha / 2)))
// for alpha != 1, and the symmetric Cauchy law exp(-scale |u|) for alpha = 1.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "levyfp/errors.hpp"
#include "levyfp/rng.hpp"

namespace levyfp {

struct StableParams {
  double alpha = 0.5;
  double beta = 0.0;
  double scale = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable index alpha must lie in (0, 2)");
    if (!(beta >= -1.0 && beta <= 1.0)) throw DomainError("stable skewness beta must lie in [-1, 1]");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("stable scale must be > 0");
    if (alpha == 1.0 && beta != 0.0)
      throw Unsupported("alpha = 1 with beta != 0 is not strictly stable without drift");
  }

  friend bool operator==(const StableParams&, const StableParams&) = default;
};

namespace detail {

struct StableConstants {
  double alpha;
  double inv_alpha;
  double shift;        // B = arctan(beta tan(pi alpha/2)) / alpha
  double amplitude;    // scale * (1 + beta^2 tan^2(pi alpha/2))^{1/(2 alpha)}
  double power;        // (1 - alpha) / alpha
  bool cauchy;
  double scale;
};

inline StableConstants stable_constants(const StableParams& p) {
  StableConstants k{};
  k.alpha = p.alpha;
  k.inv_alpha = 1.0 / p.alpha;
  k.cauchy = p.alpha == 1.0;
  k.scale = p.scale;
  if (!k.cauchy) {
    const double t = p.beta * std::tan(std::numbers::pi * p.alpha / 2.0);
    k.shift = std::atan(t) / p.alpha;
    k.amplitude = p.scale * std::pow(1.0 + t * t, 1.0 / (2.0 * p.alpha));
    k.power = (1.0 - p.alpha) / p.alpha;
  }
  return k;
}

/// Chambers-Mallows-Stuck transform of an angle V in (-pi/2, pi/2) and an
/// Exp(1) variable W.
inline double stable_transform(const StableConstants& k, double v, double w) {
  if (k.cauchy) return k.scale * std::tan(v);
  const double a = k.alpha * (v + k.shift);
  return k.amplitude * std::sin(a) / std::pow(std::cos(v), k.inv_alpha) *
         std::pow(std::cos(v - a) / w, k.power);
}

}  // namespace detail

/// Reusable sampler; construction precomputes the transform constants.
class StableSampler {
 public:
  explicit StableSampler(const StableParams& params) : params_(params) {
    params_.validate();
    k_ = detail::stable_constants(params_);
  }

  const StableParams& params() const { return params_; }

  double operator()(RngStream& rng) const {
    const double v = rng.uniform_angle();
    const double w = k_.cauchy ? 1.0 : rng.exponential();
    return detail::stable_transform(k_, v, w);
  }

 private:
  StableParams params_;
  detail::StableConstants k_{};
};

/// n i.i.d. draws of Z(1) from the given stream.
inline std::vector<double> sample_stable(const StableParams& params, std::size_t n,
                                         StreamId stream) {
  if (n == 0) throw DomainError("sample_stable requires n >= 1");
  StableSampler sampler(params);
  RngStream rng(stream);
  std::vector<double> out(n);
  for (auto& x : out) x = sampler(rng);
  return out;
}

/// rho = P(Z(1) > 0) = 1/2 + arctan(beta tan(pi alpha/2)) / (pi alpha).
///
/// Evaluated through |beta| and a final reflection so that
/// rho(alpha, -beta) == 1 - rho(alpha, beta) holds bit-for-bit.
inline double positivity_parameter(const StableParams& params) {
  params.validate();
  if (params.alpha == 1.0) return 0.5;
  const double t = std::tan(std::numbers::pi * params.alpha / 2.0);
  const double magnitude =
      std::atan(std::abs(params.beta) * std::abs(t)) / (std::numbers::pi * params.alpha);
  const bool upper = params.beta * t >= 0.0;
  const double r = 0.5 + magnitude;
  return upper ? r : 1.0 - r;
}

/// Constants c_+ and c_- of the Lévy density c_{+/-} |x|^{-1-alpha}.
struct StableLevyDensity {
  double c_plus;
  double c_minus;
};

inline StableLevyDensity stable_levy_density(const StableParams& params) {
  params.validate();
  if (params.alpha == 1.0) {
    // Cauchy: total constant scale / (pi/2) split evenly.
    const double c = params.scale / std::numbers::pi;
    return {c, c};
  }
  const double total = std::pow(params.scale, params.alpha) /
                       (-std::tgamma(-params.alpha) * std::cos(std::numbers::pi * params.alpha / 2.0));
  return {total * (1.0 + params.beta) / 2.0, total * (1.0 - params.beta) / 2.0};
}

/// Closed-form characteristic exponent of Z(1).
inline std::complex<double> stable_characteristic_exponent(const StableParams& params, double u) {
  if (u == 0.0) return {0.0, 0.0};
  const double mag = std::pow(params.scale * std::abs(u), params.alpha);
  if (params.alpha == 1.0) return {-mag, 0.0};
  const double skew = params.beta * std::tan(std::numbers::pi * params.alpha / 2.0);
  return {-mag, mag * skew * (u > 0 ? 1.0 : -1.0)};
}

}  // namespace levyfp
