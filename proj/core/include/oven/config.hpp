#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oven/control.hpp"
#include "oven/harmonic.hpp"
#include "oven/materials.hpp"
#include "oven/orchestrator.hpp"
#include "oven/scene.hpp"
#include "oven/spectrum.hpp"

namespace oven {

enum class Scenario { modes, spectrum, heat, control };

const char* scenario_name(Scenario s);

struct ModesSettings {
  int m = 3;
  int n = 3;
  double f_lo = 10.0e9;
  double f_hi = 10.8e9;
};

struct GridSettings {
  GridOptions options;
  double f_max = 0.0;  // 0: highest frequency the scenario uses
};

struct ThermalGridSettings {
  std::array<int, 3> refine{1, 1, 1};
  std::optional<std::array<int, 3>> counts;  // overrides refine
};

// Snap nominal drive frequencies to the nearest peak of an FDTD spectrum.
struct LocateSettings {
  double f_center = 0.0;
  double f_span = 0.0;
  double duration = 100e-9;  // s of simulated time
  double max_shift = 0.02;   // relative; farther peaks are an error
};

struct DriveSettings {
  std::vector<double> freqs;
  std::vector<double> weights;
  std::optional<LocateSettings> locate;
};

struct ControllerSettings {
  ControllerState gains;
  bool tune = false;
  double tune_power = 0.5;      // W
  double tune_duration = 600;   // s
  double tau_c = 10.0;          // s
};

struct CompanionSettings {
  bool enabled = false;
  std::optional<std::array<int, 3>> thermal_counts;
};

struct RunConfig {
  Scenario scenario = Scenario::modes;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  double snapshot_interval = 5.0;
  std::uint64_t hash = 0;  // FNV-1a of the source text

  MaterialLibrary materials = MaterialLibrary::bundled();
  Scene scene = prototype_scene(true);
  GridSettings grid;
  ThermalGridSettings thermal_grid;
  HarmonicOptions em;
  ModesSettings modes;
  SpectrumOptions spectrum;
  DriveSettings drive;
  CouplingPolicy coupling;
  double cte_ref = 7.0e-6;
  PowerSchedule schedule;
  std::optional<Profile> profile;
  ControllerSettings controller;
  double sensor_noise = 0.0;
  double t_end = 0.0;
  CompanionSettings companion;
};

// Parses and validates; throws ConfigError with the offending key path.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace oven
