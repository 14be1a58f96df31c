#pragma once

// kappa(a, 0), ladder records, renewal estimates and positivity profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "levyfp/decompose.hpp"
#include "levyfp/errors.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/parallel.hpp"
#include "levyfp/rng.hpp"
#include "levyfp/simulate.hpp"
#include "levyfp/stats.hpp"

namespace levyfp {

/// t -> P(X(t) >= 0), either a constant rho or a table with standard errors.
class PositivityProfile {
 public:
  struct Table {
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> se;
  };

  static PositivityProfile constant(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("positivity probability outside [0, 1]");
    PositivityProfile out;
    out.data_ = rho;
    return out;
  }

  static PositivityProfile tabulated(Table table) {
    const std::size_t n = table.t.size();
    if (n == 0 || table.p.size() != n || table.se.size() != n)
      throw DomainError("positivity table needs matching non-empty t, p and se");
    for (std::size_t k = 0; k < n; ++k) {
      if (!(table.t[k] > 0.0)) throw DomainError("positivity table times must be > 0");
      if (k > 0 && !(table.t[k] > table.t[k - 1])) throw DomainError("positivity table times must increase");
      if (!(table.p[k] >= 0.0 && table.p[k] <= 1.0)) throw DomainError("positivity probability outside [0, 1]");
    }
    PositivityProfile out;
    out.data_ = std::move(table);
    return out;
  }

  bool is_constant() const { return std::holds_alternative<double>(data_); }
  const Table& table() const { return std::get<Table>(data_); }

  /// Linear in ln t between table points, flat beyond the ends.
  double operator()(double t) const {
    if (const double* rho = std::get_if<double>(&data_)) return *rho;
    const Table& tab = std::get<Table>(data_);
    if (t <= tab.t.front()) return tab.p.front();
    if (t >= tab.t.back()) return tab.p.back();
    const auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - tab.t.begin());
    const double w = std::log(t / tab.t[k - 1]) / std::log(tab.t[k] / tab.t[k - 1]);
    return tab.p[k - 1] + w * (tab.p[k] - tab.p[k - 1]);
  }

 private:
  std::variant<double, Table> data_ = 0.5;
};

inline constexpr double kKappaULimit = 40.0;
inline constexpr int kKappaPanels = 10000;

/// kappa(a, 0) = exp(int_0^inf (e^{-t} - e^{-at}) t^{-1} P(X(t) >= 0) dt),
/// Simpson's rule in u = ln t over [-40, 40].
inline double kappa(const PositivityProfile& profile, double a, double b = 0.0) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("kappa requires a > 0");
  if (!(b >= 0.0)) throw DomainError("kappa requires b >= 0");
  if (b > 0.0) throw Unsupported("kappa(a, b) with b > 0 needs the joint law of (L^{-1}, H)");
  if (a == 1.0) return 1.0;
  auto f = [&](double u) {
    const double t = std::exp(u);
    return (std::expm1(-t) - std::expm1(-a * t)) * profile(t);
  };
  const double lo = -kKappaULimit, hi = kKappaULimit;
  const double h = (hi - lo) / kKappaPanels;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < kKappaPanels; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(lo + h * k);
  return std::exp(sum * h / 3.0);
}

struct LadderSample {
  std::vector<double> epochs;
  std::vector<double> heights;
};

/// Record epochs and heights along the monitored points: a point is a record
/// when its value reaches the running maximum. The origin is always a record.
inline LadderSample ladder_process(const PathSample& path) {
  LadderSample out;
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    if (path.values[k] >= running) {
      running = path.values[k];
      out.epochs.push_back(path.times[k]);
      out.heights.push_back(running);
    }
  }
  return out;
}

/// Mean number of records with height < x; each record carries one unit of
/// local time.
inline double renewal_estimate(std::span<const LadderSample> samples, double x) {
  if (samples.empty()) throw DomainError("renewal estimate needs at least one ladder sample");
  double total = 0.0;
  for (const auto& s : samples) {
    const auto it = std::lower_bound(s.heights.begin(), s.heights.end(), x);
    total += static_cast<double>(it - s.heights.begin());
  }
  return total / static_cast<double>(samples.size());
}

/// Monte Carlo P(X(t) >= 0) on t_grid, monitored exactly at those times.
inline PositivityProfile spitzer_profile(const LevyModel& model, std::span<const double> t_grid,
                                         std::uint64_t n_paths, std::uint64_t seed,
                                         unsigned threads = 1) {
  if (t_grid.empty()) throw DomainError("spitzer profile needs a time grid");
  if (n_paths == 0) throw DomainError("spitzer profile needs n_paths >= 1");
  std::vector<double> pts{0.0};
  for (double t : t_grid) {
    if (!(t > pts.back())) throw DomainError("spitzer profile times must be positive and increasing");
    pts.push_back(t);
  }
  const TimeGrid grid = TimeGrid::from_points(pts);
  const ProcessSimulator sim(model);
  const std::size_t n = t_grid.size();
  using Counts = std::vector<std::uint64_t>;
  const Counts counts = reduce_paths(
      n_paths, threads, Counts(n, 0),
      [&](std::uint64_t path, Counts& acc) {
        RngStream rng(seed, path, stream_tag::kProcess);
        std::size_t k = 0;
        sim.walk(grid, rng, [&](const PathEvent& e) {
          if (e.on_grid && e.t > 0.0) acc[k++] += e.x >= 0.0;
          return true;
        });
      },
      [](Counts& t, const Counts& p) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] += p[i];
      });
  PositivityProfile::Table tab;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = static_cast<double>(counts[k]) / static_cast<double>(n_paths);
    tab.t.push_back(t_grid[k]);
    tab.p.push_back(p);
    tab.se.push_back(stats::binomial_se(p, n_paths));
  }
  return PositivityProfile::tabulated(std::move(tab));
}

struct SmallTimePositivity {
  PositivityProfile profile;
  bool below_one = false;  // every estimate stays below 1 - 1e-3
};

/// P(X(t) >= 0) at t = 1e-3 and 1e-2, reported against 1 - 1e-3.
inline SmallTimePositivity small_time_positivity(const LevyModel& model, std::uint64_t n_paths,
                                                 std::uint64_t seed, unsigned threads = 1) {
  const double ts[] = {1e-3, 1e-2};
  SmallTimePositivity out{spitzer_profile(model, ts, n_paths, seed, threads)};
  const auto& p = out.profile.table().p;
  out.below_one = std::all_of(p.begin(), p.end(), [](double v) { return v < 1.0 - 1e-3; });
  return out;
}

/// Ladder samples of X on a fixed grid, one per path.
inline std::vector<LadderSample> ladder_samples(const LevyModel& model, const TimeGrid& grid,
                                                std::uint64_t n_paths, std::uint64_t seed,
                                                unsigned threads = 1) {
  const ProcessSimulator sim(model);
  using Acc = std::vector<LadderSample>;
  return reduce_paths(
      n_paths, threads, Acc{},
      [&](std::uint64_t path, Acc& acc) {
        acc.push_back(ladder_process(sample_path(sim, grid, {seed, path, stream_tag::kProcess})));
      },
      [](Acc& t, Acc& p) {
        for (auto& s : p) t.push_back(std::move(s));
      });
}

struct RenewalConvergence {
  double v_process;               // V-hat for X
  std::vector<double> T;
  std::vector<double> v_remainder;  // V-hat for Y_T = X + S_T at each T
  std::vector<double> gap() const {
    std::vector<double> out;
    for (double v : v_remainder) out.push_back(std::abs(v - v_process));
    return out;
  }
};

/// Record counts below x for X and for the negative-side remainders Y_T,
/// all read off the same paths. Thinning uses one shared uniform per jump,
/// so a smaller delta(T) removes a subset of the jumps removed before.
inline RenewalConvergence renewal_convergence(const LevyModel& model, std::span<const double> Ts,
                                              double x, const TimeGrid& grid,
                                              std::uint64_t n_paths, std::uint64_t seed,
                                              unsigned threads = 1) {
  if (Ts.empty()) throw DomainError("renewal convergence needs at least one T");
  if (n_paths == 0) throw DomainError("renewal convergence needs n_paths >= 1");
  LevyModel pm = model;
  pm.mode = SimMode::perturbed;
  const ProcessSimulator sim(pm);
  std::vector<Decomposition> splits;
  for (double T : Ts) splits.push_back(build_decomposition(pm, T, JumpSide::negative));
  const std::size_t m = Ts.size();

  auto count_records = [&](std::uint64_t path, const Decomposition* thin) {
    RngStream rng(seed, path, stream_tag::kProcess);
    double running = -std::numeric_limits<double>::infinity();
    std::uint64_t n = 0;
    sim.walk(grid, rng, [&](const PathEvent& e) {
      if (!e.on_grid) return true;
      const double y = e.x + e.s;
      if (y >= running) {
        running = y;
        if (y < x) ++n;
      }
      return running < x;
    }, thin);
    return n;
  };

  using Counts = std::vector<std::uint64_t>;
  const Counts counts = reduce_paths(
      n_paths, threads, Counts(m + 1, 0),
      [&](std::uint64_t path, Counts& acc) {
        acc[0] += count_records(path, nullptr);
        for (std::size_t j = 0; j < m; ++j) acc[j + 1] += count_records(path, &splits[j]);
      },
      [](Counts& t, const Counts& p) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] += p[i];
      });
  const double nn = static_cast<double>(n_paths);
  RenewalConvergence out;
  out.v_process = static_cast<double>(counts[0]) / nn;
  out.T.assign(Ts.begin(), Ts.end());
  for (std::size_t j = 0; j < m; ++j) out.v_remainder.push_back(static_cast<double>(counts[j + 1]) / nn);
  return out;
}

}  // namespace levyfp
