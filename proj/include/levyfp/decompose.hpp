#pragma once

// The horizon-dependent split of X into a small subordinator S_T carrying a
// delta(T)-fraction of the big jumps on one side and a remainder Y_T:
//   negative side: X = Y_T - S_T      positive side: X = Y_T + S_T

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "levyfp/errors.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/quadrature.hpp"
#include "levyfp/rng.hpp"
#include "levyfp/rvcalc.hpp"

namespace levyfp {

/// Law of a jump magnitude with density g on (a, inf), sampled by inverse CDF
/// on a table of knots equally spaced in log x.
class JumpLaw {
 public:
  static constexpr std::size_t kDefaultKnots = 4096;

  template <class G>
  JumpLaw(G&& g, double a, std::size_t knots = kDefaultKnots) : a_(a) {
    if (!(a > 0.0)) throw DomainError("jump law support must start at a > 0");
    if (knots < 2) throw DomainError("jump law needs at least two knots");
    auto in_s = [&](double s) {
      const double x = a * std::exp(s);
      return g(x) * x;
    };
    s_max_ = quad::decay_window(in_s);
    ds_ = s_max_ / static_cast<double>(knots - 1);
    cumulative_.resize(knots);
    cumulative_[0] = 0.0;
    for (std::size_t k = 1; k < knots; ++k) {
      const double lo = ds_ * static_cast<double>(k - 1);
      const double piece =
          boost::math::quadrature::gauss<double, 15>::integrate(in_s, lo, lo + ds_);
      cumulative_[k] = cumulative_[k - 1] + piece;
    }
    const double x_last = a * std::exp(s_max_);
    tail_ = quad::integrate_to_infinity(g, x_last);
    total_ = cumulative_.back() + tail_;
    // Local power of the density near the end of the table, for the tail branch.
    const double g1 = in_s(s_max_ - ds_);
    const double g2 = in_s(s_max_);
    tail_index_ = (g1 > 0.0 && g2 > 0.0) ? std::max(1e-3, std::log(g1 / g2) / ds_) : 1.0;
    if (!(total_ > 0.0) || !std::isfinite(total_)) throw DomainError("jump law has no finite positive mass");
  }

  double lower() const { return a_; }
  double total_mass() const { return total_; }

  /// Magnitude whose mass below it equals u * total_mass, u in (0, 1).
  double quantile(double u) const {
    const double v = u * total_;
    const double last = cumulative_.back();
    if (v >= last) {
      const double w = std::clamp((total_ - v) / tail_, 1e-300, 1.0);
      return a_ * std::exp(s_max_) * std::pow(w, -1.0 / tail_index_);
    }
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), v);
    const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double width = cumulative_[k + 1] - cumulative_[k];
    const double frac = width > 0.0 ? (v - cumulative_[k]) / width : 0.0;
    return a_ * std::exp(ds_ * (static_cast<double>(k) + frac));
  }

  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

 private:
  double a_;
  double s_max_ = 0.0;
  double ds_ = 0.0;
  double tail_ = 0.0;
  double total_ = 0.0;
  double tail_index_ = 1.0;
  std::vector<double> cumulative_;
};

/// delta(T) = min(1 / ln ln T, 1/2).
inline double delta(double T) {
  if (!(T > std::numbers::e) || !std::isfinite(T)) throw DomainError("delta(T) requires T > e");
  return std::min(1.0 / std::log(std::log(T)), 0.5);
}

enum class JumpSide { negative, positive };

inline const char* to_string(JumpSide s) { return s == JumpSide::negative ? "negative" : "positive"; }
inline Side tail_side(JumpSide s) { return s == JumpSide::negative ? Side::left : Side::right; }

class Decomposition {
 public:
  static constexpr std::size_t kValidationPoints = 512;
  static constexpr double kValidationMax = 1e6;

  /// Empty split: the chosen side carries no regularly varying tail, S_T = 0.
  static Decomposition empty(double T, double delta_value, JumpSide side) {
    Decomposition d;
    d.T_ = T;
    d.delta_ = delta_value;
    d.side_ = side;
    return d;
  }

  Decomposition(double T, double delta_value, JumpSide side, const RegVaryingTail& tail)
      : T_(T), delta_(delta_value), side_(side), tail_(tail) {
    tail.validate();
    if (!(delta_ > 0.0 && delta_ <= 0.5)) throw DomainError("delta must lie in (0, 1/2]");
    delta_root_ = std::pow(delta_, 1.0 / tail.alpha);
    validate_remainder();
    law_ = std::make_shared<const JumpLaw>([this](double r) { return nu_S(r); }, 1.0);
    total_mass_ = law_->total_mass();
  }

  double T() const { return T_; }
  double delta() const { return delta_; }
  JumpSide side() const { return side_; }
  bool is_empty() const { return !tail_.has_value(); }
  const std::optional<RegVaryingTail>& tail() const { return tail_; }
  double total_mass() const { return total_mass_; }

  /// Original Lévy density of the split side at distance r.
  double nu(double r) const { return tail_ ? tail_->density(r) : 0.0; }

  /// Density of the subordinator's jumps at r; zero for r < 1.
  double nu_S(double r) const {
    if (!tail_ || r < 1.0) return 0.0;
    return delta_ * std::pow(r, -tail_->alpha - 1.0) *
           eval_slowly_varying(tail_->ell, delta_root_ / r);
  }

  double nu_rest(double r) const { return nu(r) - nu_S(r); }

  /// Probability that a jump of X at distance r belongs to S_T.
  double thinning_probability(double r) const {
    if (!tail_ || r < 1.0) return 0.0;
    return delta_ * eval_slowly_varying(tail_->ell, delta_root_ / r) /
           eval_slowly_varying(tail_->ell, 1.0 / r);
  }

  /// Jump magnitude of S_T (requires a non-empty split).
  double sample_jump(RngStream& rng) const { return law_->sample(rng); }
  const JumpLaw* jump_law() const { return law_.get(); }

 private:
  Decomposition() = default;

  void validate_remainder() const {
    std::vector<double> grid{1.0};
    const double step = std::log(kValidationMax) / static_cast<double>(kValidationPoints - 1);
    for (std::size_t k = 0; k < kValidationPoints; ++k) grid.push_back(std::exp(step * k));
    for (double r : grid) {
      if (nu_rest(r) < 0.0) {
        std::ostringstream msg;
        msg << "decomposition invalid: remainder density negative at |x| = " << r;
        throw DecompositionInvalid(msg.str(), r);
      }
    }
  }

  double T_ = 0.0;
  double delta_ = 0.0;
  double delta_root_ = 0.0;
  JumpSide side_ = JumpSide::negative;
  std::optional<RegVaryingTail> tail_;
  double total_mass_ = 0.0;
  std::shared_ptr<const JumpLaw> law_;
};

inline Decomposition build_decomposition(const LevyModel& model, double T, JumpSide side) {
  const double d = delta(T);
  const auto& tail = model.tail(tail_side(side));
  if (!tail) return Decomposition::empty(T, d, side);
  return Decomposition(T, d, side, *tail);
}

struct LaplaceBound {
  double value;
  bool out_of_regime;  // lambda above the small-lambda regime
};

inline constexpr double kLaplaceRegimeMax = 0.1;

/// exp(-(1/(4 alpha)) delta lambda^alpha ell(lambda delta^{1/alpha})).
inline LaplaceBound laplace_bound(const Decomposition& decomp, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("laplace bound requires lambda > 0");
  if (decomp.is_empty()) throw DomainError("laplace bound needs a regularly varying tail");
  const auto& tail = *decomp.tail();
  const double d = decomp.delta();
  const double ell = eval_slowly_varying(tail.ell, lambda * std::pow(d, 1.0 / tail.alpha));
  const double value = std::exp(-d * std::pow(lambda, tail.alpha) * ell / (4.0 * tail.alpha));
  return {value, lambda > kLaplaceRegimeMax};
}

/// floor((ln T)^{3 / (1 - alpha gamma - eps)}).
inline std::int64_t t0_threshold(double T, double alpha, double gamma, double eps) {
  const double ag = alpha * gamma;
  if (!(eps > 0.0) || !(ag - eps > 0.0) || !(ag + eps < 1.0))
    throw DomainError("t0 threshold requires eps > 0, alpha*gamma - eps > 0, alpha*gamma + eps < 1");
  if (!(T > 1.0)) throw DomainError("t0 threshold requires T > 1");
  const double v = std::pow(std::log(T), 3.0 / (1.0 - ag - eps));
  // ln(e^k) may land one ulp below k; absorb that before flooring.
  return static_cast<std::int64_t>(std::floor(v * (1.0 + 1e-12)));
}

}  // namespace levyfp
