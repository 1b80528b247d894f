// oven: command-line driver for the cavity simulator.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "oven/config.hpp"
#include "oven/error.hpp"
#include "oven/output.hpp"
#include "oven/scenario.hpp"
#include "oven/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

void set_threads() {
  for (const char* var : {"OVEN_THREADS", "OMP_NUM_THREADS"}) {
    if (const char* v = std::getenv(var)) {
      const int n = std::atoi(v);
      if (n > 0) {
        omp_set_num_threads(n);
        return;
      }
    }
  }
}

struct ModeFlags {
  double a = 0, b = 0, ld = 0, lair = 10e-3, epsr = 0;
  int m = 3, n = 3;
  std::vector<double> band;
};

int run_modes_flags(const ModeFlags& f, const std::string& out_dir, bool validate, const std::string& argline) {
  oven::CavitySpec spec{f.a, f.b, f.ld, f.lair, f.epsr};
  try {
    spec.validate();
    if (f.band.size() != 2 || !(f.band[0] < f.band[1]))
      throw oven::InvalidArgument("--band needs two frequencies f_lo < f_hi");
  } catch (const oven::InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  }
  if (validate) return kOk;
  const auto modes = oven::solve_resonances(spec, f.m, f.n, f.band[0], f.band[1]);
  const auto hash = oven::fnv1a64(argline);
  std::cout << oven::modes_csv(modes, hash);
  if (!out_dir.empty()) oven::write_modes_csv(std::filesystem::path(out_dir) / "modes.csv", modes, hash);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled EM / thermal / cure simulator of an open-ended microwave cavity"};
  app.set_version_flag("--version", std::string(oven::kVersion));
  app.require_subcommand(1);

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string config;
  std::string out_dir;
  bool validate = false;
  ModeFlags mf;

  auto* modes = app.add_subcommand("modes", "analytic TM resonance table");
  modes->add_option("--config", config, "run configuration (YAML)");
  modes->add_option("--a", mf.a, "cavity width, m");
  modes->add_option("--b", mf.b, "cavity height, m");
  modes->add_option("--ld", mf.ld, "dielectric length, m");
  modes->add_option("--lair", mf.lair, "air section length, m")->capture_default_str();
  modes->add_option("--epsr", mf.epsr, "filler relative permittivity");
  modes->add_option("--m", mf.m, "transverse index m")->capture_default_str();
  modes->add_option("--n", mf.n, "transverse index n")->capture_default_str();
  modes->add_option("--band", mf.band, "f_lo f_hi in Hz")->expected(2);
  modes->add_option("--output", out_dir, "also write modes.csv into this directory");
  modes->add_flag("--validate", validate, "check inputs only");

  std::vector<CLI::App*> runs;
  for (const auto& [name, help] : std::vector<std::pair<const char*, const char*>>{
           {"spectrum", "FDTD frequency response"},
           {"heat", "open-loop coupled run with a fixed power schedule"},
           {"control", "closed-loop coupled run tracking a temperature profile"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration (YAML)")->required();
    sub->add_option("--output", out_dir, "override output.directory");
    sub->add_flag("--validate", validate, "parse and check the configuration only");
    runs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_pattern("[%H:%M:%S] %^%l%$ %v");
  set_threads();

  CLI::App* chosen = app.get_subcommands().front();
  const std::string scenario = chosen->get_name();

  try {
    if (scenario == "modes" && config.empty()) {
      std::string argline;
      for (int i = 1; i < argc; ++i) argline += std::string(argv[i]) + " ";
      return run_modes_flags(mf, out_dir, validate, argline);
    }
    oven::RunConfig cfg = oven::load_config(config);
    if (scenario != oven::scenario_name(cfg.scenario))
      throw oven::ConfigError("scenario", "config declares '" + std::string(oven::scenario_name(cfg.scenario)) +
                                              "' but the '" + scenario + "' subcommand was given");
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (validate) {
      // Grid sizing is part of validation: it catches oversized runs.
      if (cfg.scenario != oven::Scenario::modes) oven::scenario_grid(cfg);
      spdlog::info("{}: configuration is valid", config);
      return kOk;
    }
    const auto res = oven::run_scenario(cfg);
    if (cfg.scenario == oven::Scenario::modes) std::cout << oven::modes_csv(res.modes, cfg.hash);
    for (const auto& f : res.files) spdlog::debug("wrote {}", f.string());
    spdlog::info("wrote {} files to {}", res.files.size(), cfg.output_dir.string());
    return kOk;
  } catch (const oven::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfigError;
  } catch (const oven::GridTooLarge& e) {
    spdlog::error("{}", e.what());
    return kNumericalError;
  } catch (const oven::InvalidArgument& e) {
    spdlog::error("invalid input: {}", e.what());
    return kConfigError;
  } catch (const oven::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kNumericalError;
  }
}
