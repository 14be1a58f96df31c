#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "levyfp/experiment.hpp"

namespace {

void report_error(const std::filesystem::path& out, const nlohmann::json& record) {
  std::cerr << record.dump() << '\n';
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (!ec) std::ofstream(out / "error.json") << record.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival probabilities of Lévy processes below moving boundaries"};
  std::string config_path;
  std::string out_dir = "./out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--threads", threads, "override run.threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "print nothing on success");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::filesystem::path out(out_dir);
  levyfp::ExperimentConfig cfg;
  try {
    cfg = levyfp::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
  } catch (const levyfp::ConfigError& e) {
    nlohmann::json rec{{"error", "config"}, {"violations", nlohmann::json::array()}};
    for (const auto& v : e.violations())
      rec["violations"].push_back({{"field", v.field}, {"message", v.message}});
    report_error(out, rec);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto result = levyfp::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    levyfp::write_outputs(cfg, result, out, wall);
    if (!quiet) {
      for (const auto& n : result.notes) std::cout << "note: " << n << '\n';
      for (const auto& r : result.rows) {
        if (r.kind == "fit")
          std::cout << r.boundary_kind << " gamma=" << r.gamma << ": rho_hat = " << r.p_hat << '\n';
      }
      std::cout << result.rows.size() << " rows written to " << (out / "results.csv").string()
                << " in " << wall << " s\n";
    }
  } catch (const levyfp::ConfigError& e) {
    nlohmann::json rec{{"error", "config"}, {"violations", nlohmann::json::array()}};
    for (const auto& v : e.violations())
      rec["violations"].push_back({{"field", v.field}, {"message", v.message}});
    report_error(out, rec);
    return 2;
  } catch (const levyfp::DecompositionInvalid& e) {
    report_error(out, {{"error", "runtime"}, {"type", "decomposition_invalid"}, {"message", e.what()},
                       {"offending_x", e.offending_x()}});
    return 3;
  } catch (const std::exception& e) {
    report_error(out, {{"error", "runtime"}, {"message", e.what()}});
    return 3;
  }
  return 0;
}
