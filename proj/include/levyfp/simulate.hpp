#pragma once

// Path generation on monitoring grids with per-path counter-based streams.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "levyfp/decompose.hpp"
#include "levyfp/errors.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/rng.hpp"
#include "levyfp/stable.hpp"

namespace levyfp {

enum class GridPolicy { uniform, geometric, integers, explicit_points };

inline const char* to_string(GridPolicy p) {
  switch (p) {
    case GridPolicy::uniform: return "uniform";
    case GridPolicy::geometric: return "geometric";
    case GridPolicy::integers: return "integers";
    case GridPolicy::explicit_points: return "explicit";
  }
  return "explicit";
}

/// Monitoring times 0 = t_0 < t_1 < ... < t_K = horizon.
class TimeGrid {
 public:
  static TimeGrid from_points(std::vector<double> points,
                              GridPolicy policy = GridPolicy::explicit_points) {
    if (points.empty() || points.front() != 0.0) throw DomainError("time grid must start at 0");
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (!(points[k] > points[k - 1]))
        throw DomainError("time grid must be strictly increasing (duplicate or unordered point)");
    }
    if (!std::isfinite(points.back())) throw DomainError("time grid horizon must be finite");
    TimeGrid g;
    g.points_ = std::move(points);
    g.policy_ = policy;
    return g;
  }

  static TimeGrid uniform(double horizon, double dt) {
    check_horizon(horizon);
    if (!(dt > 0.0)) throw DomainError("grid step must be > 0");
    std::vector<double> pts{0.0};
    for (std::uint64_t k = 1;; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (t >= horizon - 1e-9 * dt) break;
      pts.push_back(t);
    }
    pts.push_back(horizon);
    return from_points(std::move(pts), GridPolicy::uniform);
  }

  static TimeGrid integers(double horizon) {
    check_horizon(horizon);
    std::vector<double> pts{0.0};
    const auto n = static_cast<std::uint64_t>(std::floor(horizon));
    for (std::uint64_t k = 1; k <= n; ++k) pts.push_back(static_cast<double>(k));
    if (pts.back() < horizon) pts.push_back(horizon);
    return from_points(std::move(pts), GridPolicy::integers);
  }

  /// Step clamp(t / 8, resolution, max_step): fine near zero where the moving
  /// boundary changes fastest relative to the process scale, uniform later.
  static TimeGrid geometric(double horizon, double resolution, double max_step = 1.0) {
    check_horizon(horizon);
    if (!(resolution > 0.0) || !(max_step >= resolution))
      throw DomainError("geometric grid needs 0 < resolution <= max_step");
    std::vector<double> pts{0.0};
    double t = 0.0;
    for (;;) {
      const double step = std::clamp(t / 8.0, resolution, max_step);
      t += step;
      if (t >= horizon - 1e-9 * step) break;
      pts.push_back(t);
    }
    pts.push_back(horizon);
    return from_points(std::move(pts), GridPolicy::geometric);
  }

  /// Same grid with additional points merged in (points beyond the horizon
  /// are ignored; near-duplicates collapse onto the extra point).
  TimeGrid with_points(std::span<const double> extra) const {
    std::vector<double> merged = points_;
    for (double e : extra)
      if (e > 0.0 && e <= horizon()) merged.push_back(e);
    std::sort(merged.begin(), merged.end());
    std::vector<double> out;
    out.reserve(merged.size());
    for (double t : merged) {
      if (!out.empty() && t - out.back() <= 1e-12 * std::max(1.0, t)) {
        // keep whichever is an exact requested point
        if (std::find(extra.begin(), extra.end(), t) != extra.end()) out.back() = t;
        continue;
      }
      out.push_back(t);
    }
    out.front() = 0.0;
    return from_points(std::move(out), policy_);
  }

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t k) const { return points_[k]; }
  double horizon() const { return points_.back(); }
  GridPolicy policy() const { return policy_; }

 private:
  static void check_horizon(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid horizon must be > 0");
  }

  std::vector<double> points_;
  GridPolicy policy_ = GridPolicy::explicit_points;
};

/// A monitored path: values at grid points and at jump epochs (merged, in
/// time order). jump_times lists the compound-Poisson epochs separately.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> jump_times;
  StreamId stream;
};

/// One monitored point of a simulated path. `x` is X(t); `s` is the running
/// sum of jumps thinned into S_T (zero without a decomposition).
struct PathEvent {
  double t;
  double x;
  double s;
  bool on_grid;
  bool jump;
};

/// Immutable per-model simulation state (jump tables, compensators).
class ProcessSimulator {
 public:
  explicit ProcessSimulator(const LevyModel& model) : model_(model) {
    const auto report = validate_model(model);
    if (!report.ok())
      throw DomainError("invalid model: " + report.violations.front().field + ": " +
                        report.violations.front().message);
    if (model.mode == SimMode::exact) {
      sampler_.emplace(*model.stable);
      inv_alpha_ = 1.0 / model.stable->alpha;
      extra_drift_ = model.b - LevyModel::stable_drift(*model.stable);
      gauss_var_ = model.sigma2;
    } else {
      prepare_perturbed();
    }
  }

  const LevyModel& model() const { return model_; }
  double jump_rate() const { return rate_left_ + rate_right_; }
  double drift() const { return drift_; }
  double gaussian_variance() const { return gauss_var_; }

  /// Walks the path over the grid, calling visit(const PathEvent&) at every
  /// monitored point in time order, starting with (0, 0). Stops early when the
  /// visitor returns false. With a decomposition, big jumps on its side are
  /// thinned into S_T (perturbed mode only); X itself is unaffected, so paths
  /// for different decompositions on the same stream are coupled.
  template <class Visitor>
  void walk(const TimeGrid& grid, RngStream& rng, Visitor&& visit,
            const Decomposition* thin = nullptr) const {
    if (model_.mode == SimMode::exact) {
      if (thin && !thin->is_empty())
        throw Unsupported("thinning needs the perturbed (compound Poisson) simulation mode");
      walk_exact(grid, rng, visit);
    } else {
      walk_perturbed(grid, rng, visit, thin);
    }
  }

 private:
  template <class Visitor>
  void walk_exact(const TimeGrid& grid, RngStream& rng, Visitor& visit) const {
    if (!visit(PathEvent{0.0, 0.0, 0.0, true, false})) return;
    double x = 0.0;
    double last_dt = -1.0, last_scale = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double dt = grid[k] - grid[k - 1];
      if (dt != last_dt) {
        last_dt = dt;
        last_scale = std::pow(dt, inv_alpha_);
      }
      x += last_scale * (*sampler_)(rng) + extra_drift_ * dt;
      if (gauss_var_ > 0.0) x += std::sqrt(gauss_var_ * dt) * rng.normal();
      if (!visit(PathEvent{grid[k], x, 0.0, true, false})) return;
    }
  }

  template <class Visitor>
  void walk_perturbed(const TimeGrid& grid, RngStream& rng, Visitor& visit,
                      const Decomposition* thin) const {
    if (!visit(PathEvent{0.0, 0.0, 0.0, true, false})) return;
    const double rate = jump_rate();
    const double inf = std::numeric_limits<double>::infinity();
    const Side thin_side = thin ? tail_side(thin->side()) : Side::left;
    const bool thinning = thin && !thin->is_empty();
    double t = 0.0, x = 0.0, s = 0.0;
    double next_jump = rate > 0.0 ? rng.exponential() / rate : inf;
    auto diffuse = [&](double dt) {
      x += drift_ * dt;
      if (gauss_var_ > 0.0) x += std::sqrt(gauss_var_ * dt) * rng.normal();
    };
    std::size_t k = 1;
    while (k < grid.size()) {
      if (next_jump < grid[k]) {
        diffuse(next_jump - t);
        t = next_jump;
        const bool right = rng.uniform() * rate < rate_right_;
        const double r = right ? law_right_->sample(rng) : law_left_->sample(rng);
        x += right ? r : -r;
        if (r > 1.0) {
          const double u = rng.uniform();
          const Side side = right ? Side::right : Side::left;
          if (thinning && side == thin_side && u < thin->thinning_probability(r)) s += r;
        }
        if (!visit(PathEvent{t, x, s, false, true})) return;
        next_jump = t + rng.exponential() / rate;
      } else {
        diffuse(grid[k] - t);
        t = grid[k];
        if (!visit(PathEvent{t, x, s, true, false})) return;
        ++k;
      }
    }
  }

  void prepare_perturbed() {
    const double eta = model_.eta;
    drift_ = model_.b;
    gauss_var_ = model_.sigma2;
    auto side_setup = [&](const std::optional<RegVaryingTail>& tail, double sign,
                          std::shared_ptr<const JumpLaw>& law, double& rate) {
      if (!tail) return;
      const RegVaryingTail tl = *tail;
      law = std::make_shared<const JumpLaw>([tl](double r) { return tl.density(r); }, eta);
      rate = law->total_mass();
      drift_ -= sign * truncated_first_moment(tl, eta, 1.0);
      gauss_var_ += truncated_second_moment(tl, eta);
    };
    side_setup(model_.tail_left, -1.0, law_left_, rate_left_);
    side_setup(model_.tail_right, 1.0, law_right_, rate_right_);
  }

  LevyModel model_;
  std::optional<StableSampler> sampler_;
  double inv_alpha_ = 1.0;
  double extra_drift_ = 0.0;
  double drift_ = 0.0;
  double gauss_var_ = 0.0;
  double rate_left_ = 0.0;
  double rate_right_ = 0.0;
  std::shared_ptr<const JumpLaw> law_left_;
  std::shared_ptr<const JumpLaw> law_right_;
};

inline PathSample sample_path(const ProcessSimulator& sim, const TimeGrid& grid, StreamId stream) {
  PathSample path;
  path.stream = stream;
  RngStream rng(stream);
  sim.walk(grid, rng, [&](const PathEvent& e) {
    path.times.push_back(e.t);
    path.values.push_back(e.x);
    if (e.jump) path.jump_times.push_back(e.t);
    return true;
  });
  return path;
}

inline PathSample sample_path(const LevyModel& model, const TimeGrid& grid, StreamId stream) {
  return sample_path(ProcessSimulator(model), grid, stream);
}

/// Walks S_T: a compound Poisson subordinator with rate total_mass. The
/// visitor receives (t, value, left_limit, on_grid); at a jump epoch
/// left_limit is the value just before the jump.
template <class Visitor>
void walk_subordinator(const Decomposition& decomp, const TimeGrid& grid, RngStream& rng,
                       Visitor&& visit) {
  if (!visit(0.0, 0.0, 0.0, true)) return;
  const double rate = decomp.is_empty() ? 0.0 : decomp.total_mass();
  const double inf = std::numeric_limits<double>::infinity();
  double value = 0.0;
  double next_jump = rate > 0.0 ? rng.exponential() / rate : inf;
  std::size_t k = 1;
  while (k < grid.size()) {
    if (next_jump < grid[k]) {
      const double before = value;
      value += decomp.sample_jump(rng);
      if (!visit(next_jump, value, before, false)) return;
      next_jump += rng.exponential() / rate;
    } else {
      if (!visit(grid[k], value, value, true)) return;
      ++k;
    }
  }
}

inline PathSample sample_subordinator_path(const Decomposition& decomp, const TimeGrid& grid,
                                           StreamId stream) {
  PathSample path;
  path.stream = stream;
  RngStream rng(stream);
  walk_subordinator(decomp, grid, rng, [&](double t, double v, double, bool on_grid) {
    path.times.push_back(t);
    path.values.push_back(v);
    if (!on_grid) path.jump_times.push_back(t);
    return true;
  });
  return path;
}

}  // namespace levyfp
