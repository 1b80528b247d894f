#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "oven/control.hpp"
#include "oven/harmonic.hpp"
#include "oven/thermal.hpp"
#include "oven/xmap.hpp"

namespace oven {

struct CouplingPolicy {
  double dt_couple = 1.0;          // s
  double resolve_threshold = 0.02; // 0 re-solves every macro-step
  std::vector<double> freqs;       // one entry: SFM
  std::vector<double> weights;     // empty: equal weights

  std::vector<double> normalized_weights() const;
  void validate() const;
};

// Source of per-watt EM dissipation maps for a given medium.
class PowerMapProvider {
 public:
  virtual ~PowerMapProvider() = default;
  virtual PowerMap solve(const CellMedium& medium, double f) = 0;
};

// FDTD-backed provider; results are cached on (f, medium contents).
class FdtdProvider : public PowerMapProvider {
 public:
  FdtdProvider(YeeGrid grid, Probe probe, bool open_end, HarmonicOptions base);

  PowerMap solve(const CellMedium& medium, double f) override;
  const HarmonicResult& result(const CellMedium& medium, double f);

  int solves() const { return solves_; }
  int hits() const { return hits_; }

 private:
  YeeGrid grid_;
  Probe probe_;
  bool open_end_;
  HarmonicOptions base_;
  std::map<std::pair<std::uint64_t, double>, HarmonicResult> cache_;
  int solves_ = 0;
  int hits_ = 0;
};

std::uint64_t medium_hash(const CellMedium& medium);

struct VfmResult {
  PowerMap map;
  double uniformity = 0.0;  // std / mean of q over the load cells
};

// std / mean of q over the masked cells.
double uniformity(const PowerMap& map, const std::vector<std::uint8_t>& load_mask);

VfmResult vfm_average(const std::vector<PowerMap>& maps, const std::vector<double>& weights,
                      const std::vector<std::uint8_t>& load_mask);

// EM voxels, thermal load and the overlap tables between them.
struct CoupledModel {
  VoxelModel em;
  ThermalModel thermal;
  Mapping mapping;
  Probe probe;
  bool open_end = true;
  double ambient_T = 293.15;
};

CoupledModel make_coupled_model(const Scene& scene, const MaterialLibrary& lib, const YeeGrid& grid,
                                std::array<int, 3> thermal_refine = {1, 1, 1},
                                double cte_ref = 0.0);
CoupledModel make_coupled_model(const Scene& scene, const MaterialLibrary& lib, const YeeGrid& grid,
                                const ThermalGrid& thermal, double cte_ref = 0.0);

struct SensorOptions {
  double noise_std = 0.0;  // K
  std::uint64_t seed = 0;
};

struct RunSpec {
  CouplingPolicy policy;
  double t_end = 0.0;
  std::optional<Profile> profile;  // closed loop when set
  ControllerState controller;
  PowerSchedule schedule;          // open loop otherwise
  SensorOptions sensor;
  std::optional<double> initial_T; // default: ambient
  double snapshot_interval = 0.0;  // s, 0 disables
  std::function<void(double, const ThermalState&)> on_snapshot;
};

struct SeriesRow {
  double t = 0.0;
  double target = 0.0;    // NaN in open loop
  double measured = 0.0;  // sensor reading (with noise)
  double power = 0.0;     // W applied over [t, t + dt_couple)
  double t_min = 0.0;
  double t_max = 0.0;
  double alpha_mean = 0.0;
  double sigma_max = 0.0;
  int em_solves = 0;
};

struct RunResult {
  std::vector<SeriesRow> series;
  ThermalState state;
  int em_solves = 0;
  std::vector<double> q_per_watt;  // last thermal source per delivered watt
  double uniformity = 0.0;         // EM load uniformity of the last map
  std::vector<std::pair<double, double>> power_trace;  // (t, P), replayable
};

RunResult run_coupled(const CoupledModel& model, PowerMapProvider& provider, const RunSpec& spec);

// Open-loop step test of the coupled plant at constant power, returning
// the (time, sensor) record including t = 0.
std::pair<std::vector<double>, std::vector<double>> step_test(const CoupledModel& model,
                                                              PowerMapProvider& provider,
                                                              const CouplingPolicy& policy,
                                                              double power, double duration);

}  // namespace oven
