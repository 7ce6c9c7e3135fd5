// casimir-rack <mode> --config FILE [--out FILE] [--workers N]
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "casimir/error.hpp"
#include "casimir/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 4;

void write(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw casimir::ConfigError("cannot write '" + path + "'");
  f << text;
}

int run(const std::string& mode_name, const std::string& config_path, const std::string& out_flag, int workers_flag) {
  using namespace casimir;
  RunConfig cfg = load_config(config_path);
  cfg.mode = parse_mode(mode_name);
  if (const char* env = std::getenv("CASIMIR_WORKERS"); env && *env) {
    try {
      cfg.numerics.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CASIMIR_WORKERS: not an integer: ") + env);
    }
  }
  if (workers_flag > 0) cfg.numerics.workers = workers_flag;
  if (!out_flag.empty()) cfg.output = out_flag;
  cfg.validate();

  switch (cfg.mode) {
    case RunMode::Force:
      write(cfg.output, run_force(cfg).str());
      return 0;
    case RunMode::SweepShift:
    case RunMode::SweepEdge: {
      const auto t = run_sweep(cfg);
      write(cfg.output, t.str());
      if (!cfg.plot_data.empty()) write(cfg.plot_data, plot_data(t, {"f_n", "f_tau"}));
      for (const auto& r : t.rows) {
        if (r.back() != "ok") return kExitNumeric;
      }
      return 0;
    }
    case RunMode::Converge: {
      const auto c = run_converge(cfg);
      write(cfg.output, c.table.str());
      std::cerr << "err_estimate " << format_number(c.err_estimate) << '\n';
      return 0;
    }
    case RunMode::Pfa:
      write(cfg.output, run_pfa(cfg).str());
      return 0;
    case RunMode::Validate: {
      const auto report = run_validate(cfg);
      write(cfg.output, report.table().str());
      for (const auto& c : report.checks) {
        if (!c.passed) std::cerr << "validation failed: " << c.name << '\n';
      }
      return report.passed() ? 0 : kExitValidation;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir forces between periodically profiled conducting plates"};
  std::string mode;
  std::string config;
  std::string out;
  int workers = 0;
  app.add_option("mode", mode, "force, sweep_shift, sweep_edge, converge, pfa or validate")
      ->required()
      ->check(CLI::IsMember({"force", "sweep_shift", "sweep_edge", "converge", "pfa", "validate"}));
  app.add_option("--config", config, "key=value configuration file")->required();
  app.add_option("--out", out, "CSV output (default stdout)");
  app.add_option("--workers", workers, "worker threads (overrides CASIMIR_WORKERS)")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  try {
    return run(mode, config, out, workers);
  } catch (const casimir::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const casimir::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const casimir::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}
