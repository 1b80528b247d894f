#include "oven/scenario.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oven/error.hpp"
#include "oven/output.hpp"

namespace oven {

namespace {

double highest_frequency(const RunConfig& cfg) {
  if (cfg.grid.f_max > 0) return cfg.grid.f_max;
  double f = 0.0;
  if (cfg.scenario == Scenario::spectrum) f = cfg.spectrum.f_center + cfg.spectrum.f_span / 2;
  for (const double d : cfg.drive.freqs) f = std::max(f, d);
  if (cfg.drive.locate) f = std::max(f, cfg.drive.locate->f_center + cfg.drive.locate->f_span / 2);
  if (!(f > 0)) throw ConfigError("grid.f_max", "cannot infer the highest simulated frequency");
  return f;
}

}  // namespace

YeeGrid scenario_grid(const RunConfig& cfg) {
  return auto_grid(cfg.scene, cfg.materials, highest_frequency(cfg), cfg.grid.options);
}

Scene companion_scene(const Scene& scene) {
  if (scene.blocks.empty()) throw InvalidArgument("companion run needs a dielectric block");
  Scene out = scene;
  out.blocks.clear();
  for (const auto& b : scene.blocks) {
    const bool is_sample = b.box.lo == scene.sample_region.lo && b.box.hi == scene.sample_region.hi;
    if (!is_sample) out.blocks.push_back(b);
  }
  if (out.blocks.empty()) throw InvalidArgument("companion run needs a dielectric block");
  out.sample_region = out.blocks.front().box;
  return out;
}

ScenarioResult run_scenario(const RunConfig& cfg) {
  ScenarioResult res;
  const auto& dir = cfg.output_dir;
  const auto h = cfg.hash;
  auto out = [&](const char* name) {
    res.files.push_back(dir / name);
    return dir / name;
  };

  if (cfg.scenario == Scenario::modes) {
    res.modes = solve_resonances(cfg.scene.cavity, cfg.modes.m, cfg.modes.n, cfg.modes.f_lo, cfg.modes.f_hi);
    write_modes_csv(out("modes.csv"), res.modes, h);
    return res;
  }

  const YeeGrid grid = scenario_grid(cfg);
  spdlog::info("EM grid {}x{}x{} ({} cells), d = {:.4g}/{:.4g}/{:.4g} mm", grid.nx, grid.ny, grid.nz,
               grid.cells(), grid.dx * 1e3, grid.dy * 1e3, grid.dz * 1e3);

  if (cfg.scenario == Scenario::spectrum) {
    res.spectrum = run_spectrum(cfg.scene, cfg.materials, grid, cfg.spectrum);
    res.peaks = find_peaks(res.spectrum);
    write_spectrum_csv(out("spectrum.csv"), res.spectrum, h);
    write_peaks_csv(out("peaks.csv"), res.peaks, h);
    return res;
  }

  // Coupled scenarios.
  res.drive_freqs = cfg.drive.freqs;
  if (cfg.drive.locate) {
    const auto& l = *cfg.drive.locate;
    SpectrumOptions so = cfg.spectrum;
    so.f_center = l.f_center;
    so.f_span = l.f_span;
    so.n_steps = 0;
    so.duration = l.duration;
    res.spectrum = run_spectrum(cfg.scene, cfg.materials, grid, so);
    res.peaks = find_peaks(res.spectrum);
    write_spectrum_csv(out("locate_spectrum.csv"), res.spectrum, h);
    res.drive_freqs = snap_to_peaks(res.peaks, cfg.drive.freqs, l.max_shift);
    for (std::size_t i = 0; i < res.drive_freqs.size(); ++i)
      spdlog::info("drive {}: nominal {:.6g} Hz locked to {:.6g} Hz", i, cfg.drive.freqs[i],
                   res.drive_freqs[i]);
  }
  CouplingPolicy policy = cfg.coupling;
  policy.freqs = res.drive_freqs;

  auto thermal_for = [&](const Scene& scene, const std::optional<std::array<int, 3>>& counts) {
    const VoxelModel vm = voxelize(scene, grid, cfg.materials);
    if (counts) {
      ThermalGrid tg;
      tg.region = vm.load_box();
      tg.nx = (*counts)[0];
      tg.ny = (*counts)[1];
      tg.nz = (*counts)[2];
      return tg;
    }
    return coincident_thermal_grid(vm, cfg.thermal_grid.refine);
  };
  const CoupledModel model = make_coupled_model(cfg.scene, cfg.materials, grid,
                                                thermal_for(cfg.scene, cfg.thermal_grid.counts), cfg.cte_ref);
  FdtdProvider provider(grid, cfg.scene.probe, cfg.scene.open_end, cfg.em);

  RunSpec spec;
  spec.policy = policy;
  spec.t_end = cfg.t_end;
  spec.sensor = {cfg.sensor_noise, cfg.seed};
  spec.snapshot_interval = cfg.snapshot_interval;
  spec.on_snapshot = [&](double t, const ThermalState& s) {
    const std::string stem = snapshot_stem(t);
    write_snapshot_csv(out((stem + ".csv").c_str()), model.thermal, s, h);
    write_snapshot_vtk(out((stem + ".vtk").c_str()), model.thermal, s, h);
  };
  if (cfg.scenario == Scenario::control) {
    spec.profile = cfg.profile;
    spec.controller = cfg.controller.gains;
    if (cfg.controller.tune) {
      const auto [t, y] = step_test(model, provider, policy, cfg.controller.tune_power,
                                    cfg.controller.tune_duration);
      StepModel sm = identify_step(t, y, model.ambient_T, cfg.controller.tune_power);
      sm.dead_time = 0.5 * policy.dt_couple;  // zero-order hold of the sampled loop
      ControllerState tuned = simc_tuning(sm, cfg.controller.tau_c, cfg.controller.gains.u_max);
      tuned.kd = cfg.controller.gains.kd;
      spdlog::info("step test: K = {:.4g} K/W, tau = {:.4g} s -> kp = {:.4g} W/K, ki = {:.4g} W/(K s)",
                   sm.gain, sm.tau, tuned.kp, tuned.ki);
      spec.controller = tuned;
      res.tuned = tuned;
    }
  } else {
    spec.schedule = cfg.schedule;
  }

  res.run = run_coupled(model, provider, spec);
  write_run_summary(out("run_summary.csv"), res.run->series, h);
  {
    // Per-watt map of the initial state, first drive frequency.
    CellMedium medium = build_medium(model.em, policy.freqs.front(), model.ambient_T);
    const ThermalState s0 = initial_state(model.thermal, model.ambient_T);
    apply_dielectric(model.mapping,
                     map_dielectric(model.mapping, s0.T, s0.alpha, model.thermal.cell_materials(),
                                    policy.freqs.front()),
                     medium);
    const PowerMap pm = provider.solve(medium, policy.freqs.front());
    write_power_csv(out("power_map.csv"), pm, model.em.load_mask, h);
    write_power_vtk(out("power_map.vtk"), pm, h);
  }

  if (cfg.companion.enabled) {
    const Scene cs = companion_scene(cfg.scene);
    const CoupledModel cm = make_coupled_model(cs, cfg.materials, grid,
                                               thermal_for(cs, cfg.companion.thermal_counts), cfg.cte_ref);
    FdtdProvider cprov(grid, cs.probe, cs.open_end, cfg.em);
    RunSpec cspec;
    cspec.policy = policy;
    cspec.t_end = cfg.t_end;
    cspec.sensor = {cfg.sensor_noise, cfg.seed};
    cspec.schedule = PowerSchedule(res.run->power_trace, PowerSchedule::Mode::hold);
    res.companion = run_coupled(cm, cprov, cspec);
    write_run_summary(out("companion_summary.csv"), res.companion->series, h);
  }
  return res;
}

}  // namespace oven
