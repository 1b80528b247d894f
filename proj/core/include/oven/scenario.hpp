#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "oven/config.hpp"
#include "oven/orchestrator.hpp"

namespace oven {

struct ScenarioResult {
  std::vector<TmMode> modes;
  std::vector<SpectrumPoint> spectrum;
  std::vector<Peak> peaks;
  std::vector<double> drive_freqs;  // after optional peak locking
  std::optional<ControllerState> tuned;
  std::optional<RunResult> run;
  std::optional<RunResult> companion;
  std::vector<std::filesystem::path> files;
};

// Grid for the configured scene and scenario.
YeeGrid scenario_grid(const RunConfig& cfg);

// Filler-only companion of a scene: the sample block is replaced by the
// background and the load becomes the first (dielectric) block.
Scene companion_scene(const Scene& scene);

// Runs the configured scenario and writes its outputs under
// cfg.output_dir.
ScenarioResult run_scenario(const RunConfig& cfg);

}  // namespace oven
