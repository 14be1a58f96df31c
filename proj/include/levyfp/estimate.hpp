#pragma once

// Survival-probability Monte Carlo, power-law exponent fits and the
// lemma-level experiments around the subordinator split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levyfp/decompose.hpp"
#include "levyfp/errors.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/parallel.hpp"
#include "levyfp/passage.hpp"
#include "levyfp/rng.hpp"
#include "levyfp/simulate.hpp"
#include "levyfp/stats.hpp"

namespace levyfp {

struct SurvivalEstimate {
  double T = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t survivors = 0;
  double p_hat = 0.0;
  stats::Interval log_ci{0.0, 0.0};  // Wilson interval mapped to ln p
  std::uint64_t seed = 0;

  bool censored() const { return survivors == 0; }
  double se() const { return stats::binomial_se(p_hat, n_paths); }
};

inline SurvivalEstimate make_estimate(double T, std::uint64_t survivors, std::uint64_t n_paths,
                                      std::uint64_t seed) {
  if (n_paths == 0) throw DomainError("estimate needs n_paths >= 1");
  if (survivors > n_paths) throw DomainError("survivors exceed path count");
  SurvivalEstimate e;
  e.T = T;
  e.n_paths = n_paths;
  e.survivors = survivors;
  e.p_hat = static_cast<double>(survivors) / static_cast<double>(n_paths);
  const auto w = stats::wilson(survivors, n_paths);
  e.log_ci = {std::log(w.low), std::log(w.high)};
  e.seed = seed;
  return e;
}

/// How monitoring grids are built for a horizon.
struct GridSpec {
  GridPolicy policy = GridPolicy::geometric;
  double resolution = 1e-3;
  double max_step = 1.0;

  TimeGrid build(double horizon) const {
    switch (policy) {
      case GridPolicy::uniform: return TimeGrid::uniform(horizon, resolution);
      case GridPolicy::integers: return TimeGrid::integers(horizon);
      case GridPolicy::geometric:
      case GridPolicy::explicit_points: break;
    }
    return TimeGrid::geometric(horizon, resolution, max_step);
  }
};

/// T_min, ..., T_max with `points` geometrically spaced values.
inline std::vector<double> geometric_T_grid(double t_min, double t_max, std::size_t points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
    throw DomainError("T grid needs 0 < T_min < T_max and at least two points");
  std::vector<double> out(points);
  const double ratio = std::log(t_max / t_min) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) out[k] = t_min * std::exp(ratio * static_cast<double>(k));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

namespace detail {
inline void check_T_grid(std::span<const double> T_grid) {
  if (T_grid.empty()) throw DomainError("T grid is empty");
  for (std::size_t k = 0; k < T_grid.size(); ++k) {
    if (!(T_grid[k] >= 0.0)) throw DomainError("T grid values must be >= 0");
    if (k > 0 && !(T_grid[k] > T_grid[k - 1])) throw DomainError("T grid must be increasing");
  }
}
}  // namespace detail

/// Survivor counts for several boundaries and horizons from one path set.
/// Every path is simulated once up to max(T_grid) and stops as soon as it
/// has crossed every boundary; survival up to each T is read off the same
/// path, so counts are exactly monotone in T and ordered across boundaries.
/// Result is indexed [boundary][T].
inline std::vector<std::vector<SurvivalEstimate>> survival_probabilities(
    const LevyModel& model, std::span<const Boundary> boundaries, std::span<const double> T_grid,
    std::uint64_t n_paths, const GridSpec& grid_spec, std::uint64_t seed, unsigned threads = 1) {
  if (n_paths == 0) throw DomainError("survival estimation needs n_paths >= 1");
  if (boundaries.empty()) throw DomainError("no boundary given");
  detail::check_T_grid(T_grid);
  const std::size_t nb = boundaries.size();
  const std::size_t nT = T_grid.size();
  const double horizon = T_grid.back();

  std::vector<std::vector<SurvivalEstimate>> out(nb);
  if (horizon == 0.0) {
    // Only X(0) = 0 is monitored.
    for (std::size_t b = 0; b < nb; ++b)
      out[b].push_back(make_estimate(0.0, 0.0 <= boundaries[b](0.0) ? n_paths : 0, n_paths, seed));
    return out;
  }

  const ProcessSimulator sim(model);
  std::vector<double> positive_T;
  for (double T : T_grid)
    if (T > 0.0) positive_T.push_back(T);
  const TimeGrid grid = grid_spec.build(horizon).with_points(positive_T);
  const std::vector<double> Ts(T_grid.begin(), T_grid.end());
  const std::vector<Boundary> bs(boundaries.begin(), boundaries.end());

  using Counts = std::vector<std::uint64_t>;
  const double inf = std::numeric_limits<double>::infinity();
  const Counts counts = reduce_paths(
      n_paths, threads, Counts(nb * nT, 0),
      [&](std::uint64_t path, Counts& acc) {
        RngStream rng(seed, path, stream_tag::kProcess);
        std::vector<double> death(nb, inf);
        std::size_t alive = nb;
        sim.walk(grid, rng, [&](const PathEvent& e) {
          for (std::size_t b = 0; b < nb; ++b) {
            if (death[b] == inf && !(e.x <= bs[b](e.t))) {
              death[b] = e.t;
              --alive;
            }
          }
          return alive > 0;
        });
        for (std::size_t b = 0; b < nb; ++b)
          for (std::size_t k = 0; k < nT; ++k)
            if (death[b] > Ts[k]) ++acc[b * nT + k];
      },
      [](Counts& total, const Counts& part) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
      });

  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = 0; k < nT; ++k)
      out[b].push_back(make_estimate(Ts[k], counts[b * nT + k], n_paths, seed));
  return out;
}

inline std::vector<SurvivalEstimate> survival_probability(const LevyModel& model,
                                                          const Boundary& boundary,
                                                          std::span<const double> T_grid,
                                                          std::uint64_t n_paths,
                                                          const GridSpec& grid_spec,
                                                          std::uint64_t seed, unsigned threads = 1) {
  return survival_probabilities(model, std::span<const Boundary>(&boundary, 1), T_grid, n_paths,
                                grid_spec, seed, threads)
      .front();
}

// ---------------------------------------------------------------------------
// Exponent fits

struct FitPoint {
  double T;
  double p;
  double var_ln_p;
};

struct ExponentFit {
  double rho_hat = 0.0;
  double std_error = 0.0;
  double r2 = 0.0;
  double intercept = 0.0;
  std::vector<double> grid;  // T values used
  std::size_t dropped = 0;   // zero-survivor points left out
};

inline constexpr std::size_t kMinFitPoints = 4;

/// Weighted least squares of ln p on ln T with weights 1 / var(ln p).
inline ExponentFit fit_power_law(std::span<const FitPoint> points) {
  std::vector<FitPoint> usable;
  std::size_t dropped = 0;
  for (const auto& p : points) {
    if (p.p > 0.0 && p.T > 0.0 && p.var_ln_p > 0.0 && std::isfinite(p.var_ln_p))
      usable.push_back(p);
    else
      ++dropped;
  }
  if (usable.size() < kMinFitPoints)
    throw DomainError("exponent fit needs at least 4 usable points");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& p : usable) {
    const double w = 1.0 / p.var_ln_p;
    sw += w;
    sx += w * std::log(p.T);
    sy += w * std::log(p.p);
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : usable) {
    const double w = 1.0 / p.var_ln_p;
    const double dx = std::log(p.T) - xbar;
    const double dy = std::log(p.p) - ybar;
    sxx += w * dx * dx;
    sxy += w * dx * dy;
    syy += w * dy * dy;
  }
  if (!(sxx > 0.0)) throw DomainError("exponent fit needs distinct T values");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (const auto& p : usable) {
    const double w = 1.0 / p.var_ln_p;
    const double r = std::log(p.p) - ybar - slope * (std::log(p.T) - xbar);
    sse += w * r * r;
  }
  ExponentFit fit;
  fit.rho_hat = -slope;
  fit.std_error = std::sqrt(1.0 / sxx);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.intercept = ybar - slope * xbar;
  for (const auto& p : usable) fit.grid.push_back(p.T);
  fit.dropped = dropped;
  return fit;
}

/// Variance of ln p-hat implied by the Wilson interval width.
inline double log_variance(const SurvivalEstimate& e) {
  const double width = (e.log_ci.high - e.log_ci.low) / (2.0 * stats::kZ95);
  return width * width;
}

inline ExponentFit fit_exponent(std::span<const SurvivalEstimate> estimates) {
  std::vector<FitPoint> pts;
  pts.reserve(estimates.size());
  for (const auto& e : estimates) {
    pts.push_back({e.T, e.p_hat, e.survivors == 0 ? 0.0 : log_variance(e)});
  }
  return fit_power_law(pts);
}

// ---------------------------------------------------------------------------
// Brownian reference values and the grid-refinement study

/// P(sigma W(t) + 0 <= level, t <= T) = 2 Phi(level / (sigma sqrt T)) - 1.
inline double brownian_constant_survival(double level, double sigma2, double T) {
  if (T == 0.0) return level >= 0.0 ? 1.0 : 0.0;
  return 2.0 * stats::normal_cdf(level / std::sqrt(sigma2 * T)) - 1.0;
}

/// -zeta(1/2) / sqrt(2 pi): the discrete-monitoring boundary shift constant.
inline constexpr double kMonitoringShift = 0.5825971579390106;

/// Survival excess of monitoring Brownian motion every dt instead of
/// continuously, from the shifted-boundary approximation.
inline double brownian_discretization_bias(double level, double sigma2, double T, double dt) {
  const double shifted = level + kMonitoringShift * std::sqrt(sigma2 * dt);
  return brownian_constant_survival(shifted, sigma2, T) - brownian_constant_survival(level, sigma2, T);
}

struct RefinementStudy {
  double dt_coarse;
  double dt_fine;
  SurvivalEstimate coarse;
  SurvivalEstimate fine;
  double drift() const { return fine.p_hat - coarse.p_hat; }
};

/// Monitors each path on a uniform grid with step dt/2 and, on the same
/// path, only at every second point (step dt). Coarse survival dominates
/// fine survival pathwise.
inline RefinementStudy grid_refinement_study(const LevyModel& model, const Boundary& boundary,
                                             double T, double dt, std::uint64_t n_paths,
                                             std::uint64_t seed, unsigned threads = 1) {
  if (n_paths == 0) throw DomainError("refinement study needs n_paths >= 1");
  const ProcessSimulator sim(model);
  const TimeGrid fine = TimeGrid::uniform(T, dt / 2.0);
  struct Acc {
    std::uint64_t coarse = 0, fine = 0;
  };
  const Acc acc = reduce_paths(
      n_paths, threads, Acc{},
      [&](std::uint64_t path, Acc& a) {
        RngStream rng(seed, path, stream_tag::kProcess);
        bool coarse_alive = true, fine_alive = true;
        std::size_t grid_index = 0;
        sim.walk(fine, rng, [&](const PathEvent& e) {
          const bool ok = e.x <= boundary(e.t);
          const bool coarse_point = !e.on_grid || grid_index % 2 == 0 || e.t == T;
          if (e.on_grid) ++grid_index;
          if (!ok) {
            fine_alive = false;
            if (coarse_point) coarse_alive = false;
          }
          return coarse_alive;
        });
        a.coarse += coarse_alive;
        a.fine += fine_alive;
      },
      [](Acc& t, const Acc& p) {
        t.coarse += p.coarse;
        t.fine += p.fine;
      });
  return {dt, dt / 2.0, make_estimate(T, acc.coarse, n_paths, seed),
          make_estimate(T, acc.fine, n_paths, seed)};
}

// ---------------------------------------------------------------------------
// Subordinator experiments

/// Copy of the model simulated through its Lévy measure, as thinning needs.
inline LevyModel perturbed_copy(const LevyModel& model) {
  LevyModel m = model;
  m.mode = SimMode::perturbed;
  return m;
}

/// Empirical E exp(-lambda S_T(1)) with its standard error.
inline stats::MeanSe laplace_transform_estimate(const Decomposition& decomp, double lambda,
                                                std::uint64_t n, std::uint64_t seed,
                                                unsigned threads = 1) {
  if (n < 2) throw DomainError("laplace estimate needs n >= 2");
  struct Acc {
    std::vector<double> values;
  };
  const TimeGrid unit = TimeGrid::from_points({0.0, 1.0});
  // Each chunk keeps its draws so the mean is folded in path order.
  Acc all = reduce_paths(
      n, threads, Acc{},
      [&](std::uint64_t path, Acc& a) {
        RngStream rng(seed, path, stream_tag::kSubordinator);
        double s1 = 0.0;
        walk_subordinator(decomp, unit, rng, [&](double, double v, double, bool) {
          s1 = v;
          return true;
        });
        a.values.push_back(std::exp(-lambda * s1));
      },
      [](Acc& t, const Acc& p) { t.values.insert(t.values.end(), p.values.begin(), p.values.end()); });
  return stats::mean_se(all.values);
}

/// Empirical P(S_T(t) > threshold).
inline SurvivalEstimate subordinator_exceedance(const Decomposition& decomp, double t,
                                                double threshold, std::uint64_t n,
                                                std::uint64_t seed, unsigned threads = 1) {
  const TimeGrid g = TimeGrid::from_points({0.0, t});
  const std::uint64_t hits = reduce_paths(
      n, threads, std::uint64_t{0},
      [&](std::uint64_t path, std::uint64_t& a) {
        RngStream rng(seed, path, stream_tag::kSubordinator);
        double st = 0.0;
        walk_subordinator(decomp, g, rng, [&](double, double v, double, bool) {
          st = v;
          return true;
        });
        a += st > threshold;
      },
      [](std::uint64_t& a, std::uint64_t b) { a += b; });
  return make_estimate(t, hits, n, seed);
}

struct ProductBoundReport {
  SurvivalEstimate lhs;       // P(X <= 1 - t^gamma, t <= T)
  SurvivalEstimate y_factor;  // P(Y_T <= 1/2, t <= T)
  SurvivalEstimate s_factor;  // P(-S_T <= 1/2 - t^gamma, t <= T)
  double rhs = 0.0;
  double difference = 0.0;  // lhs - rhs
  double se = 0.0;          // combined standard error of the difference
  bool holds = false;       // lhs >= rhs - 3 se
};

/// Lower bound through the independent split X = Y_T - S_T: the three
/// probabilities are estimated on independent path sets.
inline ProductBoundReport product_bound_check(const LevyModel& model, double T, double gamma,
                                              std::uint64_t n_paths, std::uint64_t seed,
                                              const GridSpec& grid_spec = {},
                                              unsigned threads = 1) {
  if (n_paths == 0) throw DomainError("product bound check needs n_paths >= 1");
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  ProductBoundReport r;
  const double Ts[] = {T};
  r.lhs = survival_probability(model, Boundary::decreasing(gamma, 1.0), Ts, n_paths, grid_spec,
                               seed, threads)
              .front();

  // Without negative jumps S_T vanishes and delta(T) never enters.
  const Decomposition decomp = model.tail_left
                                   ? build_decomposition(model, T, JumpSide::negative)
                                   : Decomposition::empty(T, 0.5, JumpSide::negative);
  const TimeGrid grid = grid_spec.build(T);

  const LevyModel pm = perturbed_copy(model);
  const ProcessSimulator sim(pm);
  const std::uint64_t y_surv = reduce_paths(
      n_paths, threads, std::uint64_t{0},
      [&](std::uint64_t path, std::uint64_t& acc) {
        RngStream rng(seed, path, stream_tag::kRemainder);
        bool alive = true;
        sim.walk(grid, rng, [&](const PathEvent& e) {
          if (!(e.x + e.s <= 0.5)) alive = false;  // Y_T = X + S_T
          return alive;
        }, &decomp);
        acc += alive;
      },
      [](std::uint64_t& a, std::uint64_t b) { a += b; });
  r.y_factor = make_estimate(T, y_surv, n_paths, seed);

  // S_T is piecewise constant and t^gamma - 1/2 increasing: checking left
  // limits at jump epochs and the value at T is exact continuous monitoring.
  const TimeGrid horizon_only = TimeGrid::from_points({0.0, T});
  const std::uint64_t s_surv = reduce_paths(
      n_paths, threads, std::uint64_t{0},
      [&](std::uint64_t path, std::uint64_t& acc) {
        RngStream rng(seed, path, stream_tag::kSubordinator);
        bool alive = true;
        walk_subordinator(decomp, horizon_only, rng, [&](double t, double v, double left, bool on_grid) {
          const double need = std::pow(t, gamma) - 0.5;
          if (!((on_grid ? v : left) >= need)) alive = false;
          return alive;
        });
        acc += alive;
      },
      [](std::uint64_t& a, std::uint64_t b) { a += b; });
  r.s_factor = make_estimate(T, s_surv, n_paths, seed);

  r.rhs = r.y_factor.p_hat * r.s_factor.p_hat;
  r.difference = r.lhs.p_hat - r.rhs;
  const double var_rhs = std::pow(r.s_factor.p_hat * r.y_factor.se(), 2) +
                         std::pow(r.y_factor.p_hat * r.s_factor.se(), 2);
  r.se = std::sqrt(r.lhs.se() * r.lhs.se() + var_rhs);
  r.holds = r.lhs.p_hat >= r.rhs - 3.0 * r.se;
  return r;
}

struct LemmaN0NResult {
  double epsilon;
  double delta;
  std::int64_t n_start;  // N_1(N) or the override; N + 1 when the threshold exceeds N
  double threshold;      // (ln ln N)^{4 / (1 - gamma alpha - eps)} before flooring
  std::int64_t N;
  bool range_empty;      // n_start > N: the event holds vacuously
  SurvivalEstimate estimate;
};

/// P(S_N(n) >= (n+1)^gamma for all integers n = N_1(N), ..., N) with
/// N_1(N) = floor((ln ln N)^{4 / (1 - gamma alpha - eps)}) and S_N the
/// positive-side split subordinator of a tail (alpha, ell) at horizon N.
inline LemmaN0NResult lemma_n0N_experiment(double alpha, double gamma,
                                           const SlowlyVaryingSpec& ell, std::int64_t N,
                                           std::uint64_t n_paths, std::uint64_t seed,
                                           std::optional<double> eps = std::nullopt,
                                           std::optional<std::int64_t> start_override = std::nullopt,
                                           unsigned threads = 1) {
  const double ag = alpha * gamma;
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("lemma experiment needs alpha in (0, 1)");
  if (!(ag > 0.0 && ag < 1.0)) throw DomainError("lemma experiment needs 0 < gamma alpha < 1");
  const double e = eps.value_or(0.5 * std::min(ag, 1.0 - ag));
  if (!(e > 0.0 && ag - e > 0.0 && ag + e < 1.0))
    throw DomainError("eps must satisfy gamma alpha - eps > 0 and gamma alpha + eps < 1");
  if (n_paths == 0) throw DomainError("lemma experiment needs n_paths >= 1");
  const double Nd = static_cast<double>(N);
  const double d = delta(Nd);

  LemmaN0NResult res{};
  res.epsilon = e;
  res.delta = d;
  res.N = N;
  res.threshold = std::pow(std::log(std::log(Nd)), 4.0 / (1.0 - ag - e));
  if (start_override) {
    res.n_start = *start_override;
  } else {
    res.n_start = res.threshold > Nd ? N + 1 : static_cast<std::int64_t>(std::floor(res.threshold));
  }
  res.range_empty = res.n_start > N;
  if (res.range_empty) {
    res.estimate = make_estimate(Nd, n_paths, n_paths, seed);
    return res;
  }

  LevyModel model;
  model.tail_right = RegVaryingTail{alpha, ell, Side::right};
  const Decomposition decomp = build_decomposition(model, Nd, JumpSide::positive);
  const TimeGrid grid = TimeGrid::integers(Nd);
  const std::int64_t n0 = std::max<std::int64_t>(res.n_start, 0);
  const std::uint64_t ok = reduce_paths(
      n_paths, threads, std::uint64_t{0},
      [&](std::uint64_t path, std::uint64_t& acc) {
        RngStream rng(seed, path, stream_tag::kSubordinator);
        bool alive = true;
        walk_subordinator(decomp, grid, rng, [&](double t, double v, double, bool on_grid) {
          if (on_grid && t >= static_cast<double>(n0) && !(v >= std::pow(t + 1.0, gamma))) alive = false;
          return alive;
        });
        acc += alive;
      },
      [](std::uint64_t& a, std::uint64_t b) { a += b; });
  res.estimate = make_estimate(Nd, ok, n_paths, seed);
  return res;
}

struct DiscreteSurvivalResult {
  SurvivalEstimate remainder;  // P(Y_T(n) <= x, n = 1..floor(T))
  SurvivalEstimate process;    // P(X(n) <= x, n = 1..floor(T)) on the same paths
  std::uint64_t ordering_violations = 0;  // paths where X survives but Y_T does not
};

/// Integer-time survival of the positive-side remainder Y_T = X - S_T,
/// paired with X on common paths.
inline DiscreteSurvivalResult discrete_survival_experiment(const LevyModel& model, double T,
                                                           double x, std::uint64_t seed,
                                                           std::uint64_t n_paths,
                                                           unsigned threads = 1) {
  if (!model.tail_right) throw DomainError("discrete survival experiment needs a right tail");
  if (n_paths == 0) throw DomainError("discrete survival experiment needs n_paths >= 1");
  const LevyModel pm = perturbed_copy(model);
  const ProcessSimulator sim(pm);
  const Decomposition decomp = build_decomposition(pm, T, JumpSide::positive);
  const TimeGrid grid = TimeGrid::integers(T);
  struct Acc {
    std::uint64_t y = 0, x = 0, bad = 0;
  };
  const Acc acc = reduce_paths(
      n_paths, threads, Acc{},
      [&](std::uint64_t path, Acc& a) {
        RngStream rng(seed, path, stream_tag::kProcess);
        bool y_alive = true, x_alive = true;
        sim.walk(grid, rng, [&](const PathEvent& e) {
          if (!e.on_grid) return true;
          if (!(e.x - e.s <= x)) y_alive = false;
          if (!(e.x <= x)) x_alive = false;
          return y_alive;
        }, &decomp);
        a.y += y_alive;
        a.x += x_alive;
        a.bad += (x_alive && !y_alive);
      },
      [](Acc& t, const Acc& p) {
        t.y += p.y;
        t.x += p.x;
        t.bad += p.bad;
      });
  return {make_estimate(T, acc.y, n_paths, seed), make_estimate(T, acc.x, n_paths, seed), acc.bad};
}

}  // namespace levyfp
