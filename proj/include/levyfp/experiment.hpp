#pragma once

// Batch experiments: flat "section.key = value" configs, dispatch to the
// estimators, and the results.csv / manifest.txt / plotdata.tsv writers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "levyfp/decompose.hpp"
#include "levyfp/errors.hpp"
#include "levyfp/estimate.hpp"
#include "levyfp/fluctuation.hpp"
#include "levyfp/levy_model.hpp"
#include "levyfp/passage.hpp"

namespace levyfp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Config problems, one entry per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Violation> v)
      : std::runtime_error(v.empty() ? "config error" : v.front().field + ": " + v.front().message),
        violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}
}  // namespace detail

enum class ExperimentKind {
  survival,
  exponent,
  lemma_n0N,
  product_bound,
  kappa,
  spitzer,
  integral_test,
  discrete_survival
};

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::survival: return "survival";
    case ExperimentKind::exponent: return "exponent";
    case ExperimentKind::lemma_n0N: return "lemma-n0N";
    case ExperimentKind::product_bound: return "product-bound";
    case ExperimentKind::kappa: return "kappa";
    case ExperimentKind::spitzer: return "spitzer";
    case ExperimentKind::integral_test: return "integral-test";
    case ExperimentKind::discrete_survival: return "discrete-survival";
  }
  return "?";
}

struct ExperimentConfig {
  // model
  std::optional<double> alpha;
  double beta = 0.0;
  double scale = 1.0;
  double sigma2 = 0.0;
  double drift = 0.0;
  std::string ell = "constant";
  std::optional<double> ell_c;
  double ell_p = 0.0;
  std::optional<std::string> mode;
  double eta = 1e-3;
  std::string tails = "both";
  std::optional<double> rho;
  // boundary
  std::vector<BoundaryKind> boundary_kinds{BoundaryKind::constant};
  std::vector<double> gammas{1.0};
  double level = 1.0;
  // run
  double T_min = 16.0;
  double T_max = 16384.0;
  std::size_t T_points = 8;
  std::uint64_t n_paths = 10000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  GridPolicy grid = GridPolicy::geometric;
  double resolution = 1e-3;
  double max_step = 1.0;
  // experiment
  ExperimentKind kind = ExperimentKind::survival;
  std::string id = "run";
  // kind-specific
  std::int64_t lemma_N = 10000;
  std::optional<double> lemma_eps;
  std::optional<std::int64_t> lemma_n_start;
  std::vector<double> kappa_a{0.25, 0.5, 2.0, 4.0};
  std::optional<double> kappa_rho;

  std::vector<Boundary> boundaries() const {
    std::vector<Boundary> out;
    for (BoundaryKind k : boundary_kinds) {
      if (k == BoundaryKind::constant) {
        out.push_back(Boundary::constant(level));
        continue;
      }
      for (double g : gammas)
        out.push_back(k == BoundaryKind::decreasing ? Boundary::decreasing(g, level)
                                                    : Boundary::increasing(g, level));
    }
    return out;
  }

  GridSpec grid_spec() const { return {grid, resolution, max_step}; }

  std::vector<double> T_grid() const {
    if (T_points == 1) return {T_max};
    return geometric_T_grid(T_min, T_max, T_points);
  }

  LevyModel model() const {
    LevyModel m;
    if (!alpha) {
      m = LevyModel::brownian(sigma2, drift);
    } else if (ell == "constant" && !ell_c) {
      m = LevyModel::strictly_stable({*alpha, beta, scale});
      m.sigma2 = sigma2;
      m.b += drift;
      if (mode && *mode == "perturbed") m.mode = SimMode::perturbed;
    } else {
      const double c = ell_c.value_or(1.0);
      auto spec = [&](double w) {
        return ell == "log_power" ? SlowlyVaryingSpec::log_power(ell_p, c * w)
                                  : SlowlyVaryingSpec::constant(c * w);
      };
      const bool both = tails == "both";
      if (both || tails == "left")
        m.tail_left = RegVaryingTail{*alpha, spec(both ? 1.0 - beta : 1.0), Side::left};
      if (both || tails == "right")
        m.tail_right = RegVaryingTail{*alpha, spec(both ? 1.0 + beta : 1.0), Side::right};
      // A side with zero weight carries no tail.
      if (m.tail_left && m.tail_left->ell.c == 0.0) m.tail_left.reset();
      if (m.tail_right && m.tail_right->ell.c == 0.0) m.tail_right.reset();
      m.sigma2 = sigma2;
      m.b = drift;
    }
    m.eta = eta;
    m.rho = rho;
    return m;
  }
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  std::optional<std::string> take(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  void number(const std::string& key, double& out) {
    if (auto v = parse_number(key)) out = *v;
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (auto v = parse_number(key)) out = *v;
  }
  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto v = parse_integer(key, std::is_unsigned_v<Int>)) out = static_cast<Int>(*v);
  }
  template <class Int>
  void integer(const std::string& key, std::optional<Int>& out) {
    if (auto v = parse_integer(key, std::is_unsigned_v<Int>)) out = static_cast<Int>(*v);
  }
  void text(const std::string& key, std::string& out) {
    if (auto v = take(key)) out = *v;
  }
  void number_list(const std::string& key, std::vector<double>& out) {
    const auto v = take(key);
    if (!v) return;
    std::vector<double> vals;
    for (const auto& item : split_list(*v)) {
      const auto d = to_double(item);
      if (!d) {
        fail(key, "not a number: '" + item + "'");
        return;
      }
      vals.push_back(*d);
    }
    if (vals.empty()) fail(key, "empty list");
    out = vals;
  }

  void fail(const std::string& field, const std::string& message) {
    errors.push_back({field, message});
  }

  void reject_unknown() {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) fail(k, "unknown key");
  }

  std::vector<Violation> errors;

 private:
  static std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return d;
  }

  std::optional<double> parse_number(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    const auto d = to_double(*v);
    if (!d || !std::isfinite(*d)) {
      fail(key, "not a finite number: '" + *v + "'");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::int64_t> parse_integer(const std::string& key, bool non_negative) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    const auto d = to_double(*v);
    if (!d || !(std::abs(*d) < 9e18) || *d != std::floor(*d)) {
      fail(key, "not an integer: '" + *v + "'");
      return std::nullopt;
    }
    if (non_negative && *d < 0.0) {
      fail(key, "must be >= 0");
      return std::nullopt;
    }
    return static_cast<std::int64_t>(*d);
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

}  // namespace detail

/// Parses "section.key = value" lines; '#' starts a comment.
inline ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::vector<Violation> syntax;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) {
      syntax.push_back({where, "expected 'key = value'"});
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.' ||
        std::count(key.begin(), key.end(), '.') > 1) {
      syntax.push_back({where, "key must look like 'section.name': '" + key + "'"});
      continue;
    }
    if (kv.count(key)) syntax.push_back({key, "duplicate key"});
    kv[key] = value;
  }
  if (!syntax.empty()) throw ConfigError(syntax);

  ExperimentConfig c;
  detail::ConfigReader r(std::move(kv));

  r.number("model.alpha", c.alpha);
  r.number("model.beta", c.beta);
  r.number("model.scale", c.scale);
  r.number("model.sigma2", c.sigma2);
  r.number("model.drift", c.drift);
  r.text("model.ell", c.ell);
  r.number("model.ell_c", c.ell_c);
  r.number("model.ell_p", c.ell_p);
  if (auto m = r.take("model.mode")) c.mode = *m;
  r.number("model.eta", c.eta);
  r.text("model.tails", c.tails);
  r.number("model.rho", c.rho);

  if (auto kinds = r.take("boundary.kind")) {
    c.boundary_kinds.clear();
    for (const auto& k : detail::split_list(*kinds)) {
      if (k == "constant") c.boundary_kinds.push_back(BoundaryKind::constant);
      else if (k == "decreasing") c.boundary_kinds.push_back(BoundaryKind::decreasing);
      else if (k == "increasing") c.boundary_kinds.push_back(BoundaryKind::increasing);
      else r.fail("boundary.kind", "unknown boundary kind '" + k + "'");
    }
    if (c.boundary_kinds.empty()) r.fail("boundary.kind", "empty list");
  }
  r.number_list("boundary.gamma", c.gammas);
  r.number("boundary.level", c.level);

  r.number("run.T_min", c.T_min);
  r.number("run.T_max", c.T_max);
  r.integer("run.T_points", c.T_points);
  r.integer("run.n_paths", c.n_paths);
  r.integer("run.seed", c.seed);
  r.integer("run.threads", c.threads);
  if (auto g = r.take("run.grid")) {
    if (*g == "geometric") c.grid = GridPolicy::geometric;
    else if (*g == "uniform") c.grid = GridPolicy::uniform;
    else if (*g == "integers") c.grid = GridPolicy::integers;
    else r.fail("run.grid", "unknown grid policy '" + *g + "'");
  }
  r.number("run.resolution", c.resolution);
  r.number("run.max_step", c.max_step);

  if (auto k = r.take("experiment.kind")) {
    bool found = false;
    for (auto kind : {ExperimentKind::survival, ExperimentKind::exponent, ExperimentKind::lemma_n0N,
                      ExperimentKind::product_bound, ExperimentKind::kappa, ExperimentKind::spitzer,
                      ExperimentKind::integral_test, ExperimentKind::discrete_survival}) {
      if (*k == to_string(kind)) {
        c.kind = kind;
        found = true;
      }
    }
    if (!found) r.fail("experiment.kind", "unknown experiment kind '" + *k + "'");
  } else {
    r.fail("experiment.kind", "missing");
  }
  r.text("experiment.id", c.id);

  r.integer("lemma.N", c.lemma_N);
  r.number("lemma.eps", c.lemma_eps);
  r.integer("lemma.n_start", c.lemma_n_start);
  r.number_list("kappa.a", c.kappa_a);
  r.number("kappa.rho", c.kappa_rho);

  r.reject_unknown();

  if (!c.seed) r.fail("run.seed", "seed must be given explicitly");
  if (c.threads < 1) r.fail("run.threads", "threads must be >= 1");
  if (c.n_paths < 1) r.fail("run.n_paths", "n_paths must be >= 1");
  if (c.ell != "constant" && c.ell != "log_power") r.fail("model.ell", "ell must be constant or log_power");
  if (c.tails != "both" && c.tails != "left" && c.tails != "right")
    r.fail("model.tails", "tails must be both, left or right");
  if (c.mode && *c.mode != "exact" && *c.mode != "perturbed")
    r.fail("model.mode", "mode must be exact or perturbed");
  if (c.id.empty() || c.id.find_first_of(",\"\n") != std::string::npos)
    r.fail("experiment.id", "id must be non-empty without commas or quotes");
  if (!(c.T_max > 0.0)) r.fail("run.T_max", "T_max must be > 0");
  if (c.T_points < 1) r.fail("run.T_points", "T_points must be >= 1");
  if (c.T_points > 1 && !(c.T_min > 0.0 && c.T_min < c.T_max))
    r.fail("run.T_min", "need 0 < T_min < T_max");
  if ((c.kind == ExperimentKind::exponent || c.kind == ExperimentKind::discrete_survival) && c.T_points < kMinFitPoints)
    r.fail("run.T_points", "exponent fits need T_points >= 4");
  if (!(c.resolution > 0.0)) r.fail("run.resolution", "resolution must be > 0");
  if (!(c.max_step > 0.0)) r.fail("run.max_step", "max_step must be > 0");
  for (double g : c.gammas)
    if (!(g > 0.0)) r.fail("boundary.gamma", "gamma must be > 0");

  if (r.errors.empty()) {
    const bool tail_form = c.alpha && (c.ell != "constant" || c.ell_c);
    if (tail_form && c.mode && *c.mode == "exact")
      r.fail("model.mode", "exact mode needs a strictly stable model (constant ell without ell_c)");
    if (!tail_form && c.tails != "both") r.fail("model.tails", "tails applies only to tail-specified models");
    try {
      const LevyModel m = c.model();
      for (const auto& v : validate_model(m).violations) r.fail("model." + v.field, v.message);
    } catch (const std::exception& e) {
      r.fail("model", e.what());
    }
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<Violation>{{"--config", "cannot read " + path.string()}});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Fully resolved config in the same format parse_config reads.
inline std::string config_text(const ExperimentConfig& c) {
  std::ostringstream o;
  auto line = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto list = [&](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt17(xs[i]);
    return s;
  };
  if (c.alpha) line("model.alpha", fmt17(*c.alpha));
  line("model.beta", fmt17(c.beta));
  line("model.scale", fmt17(c.scale));
  line("model.sigma2", fmt17(c.sigma2));
  line("model.drift", fmt17(c.drift));
  line("model.ell", c.ell);
  if (c.ell_c) line("model.ell_c", fmt17(*c.ell_c));
  line("model.ell_p", fmt17(c.ell_p));
  if (c.mode) line("model.mode", *c.mode);
  line("model.eta", fmt17(c.eta));
  line("model.tails", c.tails);
  if (c.rho) line("model.rho", fmt17(*c.rho));
  std::string kinds;
  for (std::size_t i = 0; i < c.boundary_kinds.size(); ++i)
    kinds += (i ? "," : "") + std::string(to_string(c.boundary_kinds[i]));
  line("boundary.kind", kinds);
  line("boundary.gamma", list(c.gammas));
  line("boundary.level", fmt17(c.level));
  line("run.T_min", fmt17(c.T_min));
  line("run.T_max", fmt17(c.T_max));
  line("run.T_points", std::to_string(c.T_points));
  line("run.n_paths", std::to_string(c.n_paths));
  line("run.seed", std::to_string(*c.seed));
  line("run.threads", std::to_string(c.threads));
  line("run.grid", to_string(c.grid));
  line("run.resolution", fmt17(c.resolution));
  line("run.max_step", fmt17(c.max_step));
  line("experiment.kind", to_string(c.kind));
  line("experiment.id", c.id);
  line("lemma.N", std::to_string(c.lemma_N));
  if (c.lemma_eps) line("lemma.eps", fmt17(*c.lemma_eps));
  if (c.lemma_n_start) line("lemma.n_start", std::to_string(*c.lemma_n_start));
  line("kappa.a", list(c.kappa_a));
  if (c.kappa_rho) line("kappa.rho", fmt17(*c.kappa_rho));
  return o.str();
}

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
  std::string experiment_id;
  std::string kind;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::string boundary_kind;
  double T = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t survivors = 0;
  double p_hat = 0.0;
  double ln_p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "experiment_id,kind,alpha,beta,gamma,boundary_kind,T,n_paths,survivors,p_hat,ln_p,ci_low,ci_high,seed";

/// One labelled survival curve for plotdata.tsv.
struct SurvivalSeries {
  std::string label;
  std::vector<SurvivalEstimate> points;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SurvivalSeries> series;  // survival/exponent runs only
  std::vector<std::string> notes;      // warnings recorded in the manifest
};

inline std::string csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream o;
  o << kCsvHeader << '\n';
  for (const auto& r : rows) {
    o << r.experiment_id << ',' << r.kind << ',' << fmt17(r.alpha) << ',' << fmt17(r.beta) << ','
      << fmt17(r.gamma) << ',' << r.boundary_kind << ',' << fmt17(r.T) << ',' << r.n_paths << ','
      << r.survivors << ',' << fmt17(r.p_hat) << ',' << fmt17(r.ln_p) << ',' << fmt17(r.ci_low)
      << ',' << fmt17(r.ci_high) << ',' << r.seed << '\n';
  }
  return o.str();
}

/// Columns: ln_T, then per series <label>.ln_p, .ci_low, .ci_high, .flag.
inline std::string plot_text(const std::vector<SurvivalSeries>& series) {
  if (series.empty() || series.front().points.empty())
    throw ConfigError(std::vector<Violation>{{"plotdata", "no survival results to emit"}});
  std::ostringstream o;
  o << "ln_T";
  for (const auto& s : series)
    o << '\t' << s.label << ".ln_p\t" << s.label << ".ci_low\t" << s.label << ".ci_high\t" << s.label << ".flag";
  o << '\n';
  const std::size_t n = series.front().points.size();
  for (std::size_t k = 0; k < n; ++k) {
    o << fmt17(std::log(series.front().points[k].T));
    for (const auto& s : series) {
      const auto& e = s.points[k];
      if (e.censored()) {
        o << "\tnan\t" << fmt17(e.log_ci.low) << '\t' << fmt17(e.log_ci.high) << "\tcensored";
      } else {
        o << '\t' << fmt17(std::log(e.p_hat)) << '\t' << fmt17(e.log_ci.low) << '\t'
          << fmt17(e.log_ci.high) << "\tok";
      }
    }
    o << '\n';
  }
  return o.str();
}

namespace detail {

inline std::string boundary_label(const Boundary& b) {
  if (b.kind == BoundaryKind::constant) return "constant";
  return std::string(to_string(b.kind)) + "_g" + fmt17(b.gamma);
}

inline ResultRow base_row(const ExperimentConfig& c, const std::string& kind) {
  ResultRow r;
  r.experiment_id = c.id;
  r.kind = kind;
  r.alpha = c.alpha.value_or(2.0);
  r.beta = c.beta;
  r.seed = *c.seed;
  return r;
}

inline ResultRow estimate_row(const ExperimentConfig& c, const std::string& kind, const SurvivalEstimate& e,
                              double gamma, const std::string& bkind) {
  ResultRow r = base_row(c, kind);
  r.gamma = gamma;
  r.boundary_kind = bkind;
  r.T = e.T;
  r.n_paths = e.n_paths;
  r.survivors = e.survivors;
  r.p_hat = e.p_hat;
  r.ln_p = std::log(e.p_hat);
  r.ci_low = e.log_ci.low;
  r.ci_high = e.log_ci.high;
  return r;
}

inline ResultRow fit_row(const ExperimentConfig& c, const ExponentFit& f, double gamma, const std::string& bkind) {
  ResultRow r = base_row(c, "fit");
  r.gamma = gamma;
  r.boundary_kind = bkind;
  r.T = f.grid.back();
  r.n_paths = c.n_paths;
  r.survivors = f.grid.size();
  r.p_hat = f.rho_hat;
  r.ln_p = f.r2;
  r.ci_low = f.rho_hat - stats::kZ95 * f.std_error;
  r.ci_high = f.rho_hat + stats::kZ95 * f.std_error;
  return r;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult out;
  const LevyModel model = c.model();
  const std::uint64_t seed = *c.seed;
  auto try_fit = [&](const std::vector<SurvivalEstimate>& pts, double gamma, const std::string& bkind) {
    std::size_t zero = 0;
    for (const auto& e : pts) zero += e.censored();
    if (zero) out.notes.push_back(bkind + ": " + std::to_string(zero) + " zero-survivor point(s) dropped from the fit");
    try {
      out.rows.push_back(detail::fit_row(c, fit_exponent(pts), gamma, bkind));
    } catch (const DomainError& e) {
      out.notes.push_back(bkind + ": no fit (" + e.what() + ")");
    }
  };

  switch (c.kind) {
    case ExperimentKind::survival:
    case ExperimentKind::exponent: {
      const auto bs = c.boundaries();
      const auto Ts = c.T_grid();
      const auto est = survival_probabilities(model, bs, Ts, c.n_paths, c.grid_spec(), seed, c.threads);
      for (std::size_t b = 0; b < bs.size(); ++b) {
        const double g = bs[b].kind == BoundaryKind::constant ? 0.0 : bs[b].gamma;
        const std::string bk = to_string(bs[b].kind);
        for (const auto& e : est[b]) out.rows.push_back(detail::estimate_row(c, "survival", e, g, bk));
        if (c.kind == ExperimentKind::exponent) try_fit(est[b], g, bk);
        out.series.push_back({detail::boundary_label(bs[b]), est[b]});
      }
      break;
    }
    case ExperimentKind::lemma_n0N: {
      if (!c.alpha) throw ConfigError(std::vector<Violation>{{"model.alpha", "lemma experiment needs alpha"}});
      const SlowlyVaryingSpec ell = c.ell == "log_power"
                                        ? SlowlyVaryingSpec::log_power(c.ell_p, c.ell_c.value_or(1.0))
                                        : SlowlyVaryingSpec::constant(c.ell_c.value_or(1.0));
      LemmaN0NResult res;
      try {
        res = lemma_n0N_experiment(*c.alpha, c.gammas.front(), ell, c.lemma_N, c.n_paths, seed,
                                   c.lemma_eps, c.lemma_n_start, c.threads);
      } catch (const DomainError& e) {
        throw ConfigError(std::vector<Violation>{{"lemma", e.what()}});
      }
      out.rows.push_back(detail::estimate_row(c, "lemma", res.estimate, c.gammas.front(), "lemma"));
      out.notes.push_back("N1 = " + fmt17(res.threshold) + ", start = " + std::to_string(res.n_start) +
                          ", eps = " + fmt17(res.epsilon) +
                          ", delta = " + fmt17(res.delta));
      if (res.range_empty) out.notes.push_back("N1 > N: the event range is empty and holds trivially");
      break;
    }
    case ExperimentKind::product_bound: {
      const double g = c.gammas.front();
      const auto rep = product_bound_check(model, c.T_max, g, c.n_paths, seed, c.grid_spec(), c.threads);
      out.rows.push_back(detail::estimate_row(c, "product-lhs", rep.lhs, g, "decreasing"));
      out.rows.push_back(detail::estimate_row(c, "product-y", rep.y_factor, g, "constant"));
      out.rows.push_back(detail::estimate_row(c, "product-s", rep.s_factor, g, "increasing"));
      ResultRow d = detail::base_row(c, rep.holds ? "product-holds" : "product-fails");
      d.gamma = g;
      d.boundary_kind = "decreasing";
      d.T = c.T_max;
      d.n_paths = c.n_paths;
      d.p_hat = rep.difference;
      d.ln_p = std::log(rep.rhs);
      d.ci_low = rep.difference - 3.0 * rep.se;
      d.ci_high = rep.difference + 3.0 * rep.se;
      out.rows.push_back(d);
      break;
    }
    case ExperimentKind::kappa: {
      const PositivityProfile profile =
          c.kappa_rho ? PositivityProfile::constant(*c.kappa_rho)
                      : spitzer_profile(model, c.T_grid(), c.n_paths, seed, c.threads);
      for (double a : c.kappa_a) {
        const double k = kappa(profile, a);
        ResultRow r = detail::base_row(c, "kappa");
        r.T = a;
        r.n_paths = c.kappa_rho ? 0 : c.n_paths;
        r.p_hat = k;
        r.ln_p = std::log(k);
        r.ci_low = r.ln_p;
        r.ci_high = r.ln_p;
        out.rows.push_back(r);
      }
      break;
    }
    case ExperimentKind::spitzer: {
      const auto profile = spitzer_profile(model, c.T_grid(), c.n_paths, seed, c.threads);
      const auto& tab = profile.table();
      for (std::size_t k = 0; k < tab.t.size(); ++k) {
        const auto n = static_cast<std::uint64_t>(std::llround(tab.p[k] * static_cast<double>(c.n_paths)));
        out.rows.push_back(detail::estimate_row(c, "positivity", make_estimate(tab.t[k], n, c.n_paths, seed), 0.0, ""));
      }
      if (const auto r = model.effective_rho()) out.notes.push_back("closed-form rho = " + fmt17(*r));
      break;
    }
    case ExperimentKind::integral_test: {
      const Boundary b = c.boundaries().front();
      const auto res = brownian_integral_test(b);
      ResultRow r = detail::base_row(c, std::string("integral-") + to_string(*res.classification));
      r.gamma = b.kind == BoundaryKind::constant ? 0.0 : b.gamma;
      r.boundary_kind = to_string(b.kind);
      r.T = std::numeric_limits<double>::infinity();
      r.p_hat = res.value;
      r.ln_p = std::log(res.value);
      r.ci_low = res.value;
      r.ci_high = res.value;
      out.rows.push_back(r);
      break;
    }
    case ExperimentKind::discrete_survival: {
      std::vector<SurvivalEstimate> rem;
      for (double T : c.T_grid()) {
        const auto res = discrete_survival_experiment(model, T, c.level, seed, c.n_paths, c.threads);
        out.rows.push_back(detail::estimate_row(c, "remainder", res.remainder, 0.0, "constant"));
        out.rows.push_back(detail::estimate_row(c, "process", res.process, 0.0, "constant"));
        if (res.ordering_violations)
          out.notes.push_back("ordering violated on " + std::to_string(res.ordering_violations) + " path(s) at T = " + fmt17(T));
        rem.push_back(res.remainder);
      }
      try_fit(rem, 0.0, "constant");
      break;
    }
  }
  return out;
}

/// Writes results.csv, manifest.txt and (for survival runs) plotdata.tsv.
inline void write_outputs(const ExperimentConfig& c, const ExperimentResult& res,
                          const std::filesystem::path& dir, double wall_seconds) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error(std::string("cannot write ") + (dir / name).string());
  };
  put("results.csv", csv_text(res.rows));
  std::ostringstream m;
  m << "# levyfp " << kToolVersion << '\n' << "# wall_time_s = " << fmt17(wall_seconds) << '\n';
  for (const auto& n : res.notes) m << "# note: " << n << '\n';
  m << config_text(c);
  put("manifest.txt", m.str());
  if (!res.series.empty()) put("plotdata.tsv", plot_text(res.series));
}

}  // namespace levyfp
