#include "oven/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oven/error.hpp"
#include "oven/output.hpp"

namespace oven {

std::vector<double> CouplingPolicy::normalized_weights() const {
  std::vector<double> w = weights.empty() ? std::vector<double>(freqs.size(), 1.0) : weights;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= s;
  return w;
}

void CouplingPolicy::validate() const {
  if (!(dt_couple > 0)) throw InvalidArgument("dt_couple must be positive");
  if (!(resolve_threshold >= 0 && resolve_threshold < 1))
    throw InvalidArgument("resolve_threshold must lie in [0, 1)");
  if (freqs.empty()) throw InvalidArgument("drive needs at least one frequency");
  for (const double f : freqs)
    if (!(f > 0)) throw InvalidArgument("drive frequencies must be positive");
  if (!weights.empty()) {
    if (weights.size() != freqs.size()) throw InvalidArgument("one weight per drive frequency");
    double s = 0.0;
    for (const double w : weights) {
      if (!(w >= 0)) throw InvalidArgument("drive weights must be >= 0");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("drive weights must sum to 1");
  }
}

std::uint64_t medium_hash(const CellMedium& medium) {
  std::uint64_t h = fnv1a64(medium.eps_r.data(), medium.eps_r.size() * sizeof(double));
  return fnv1a64(medium.sigma.data(), medium.sigma.size() * sizeof(double), h);
}

FdtdProvider::FdtdProvider(YeeGrid grid, Probe probe, bool open_end, HarmonicOptions base)
    : grid_(grid), probe_(probe), open_end_(open_end), base_(base) {}

const HarmonicResult& FdtdProvider::result(const CellMedium& medium, double f) {
  const auto key = std::make_pair(medium_hash(medium), f);
  auto it = cache_.find(key);
  if (it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  HarmonicOptions o = base_;
  o.f_drive = f;
  ++solves_;
  auto res = run_harmonic_steady(grid_, medium, probe_, open_end_, o);
  return cache_.emplace(key, std::move(res)).first->second;
}

PowerMap FdtdProvider::solve(const CellMedium& medium, double f) { return result(medium, f).map; }

double uniformity(const PowerMap& map, const std::vector<std::uint8_t>& load_mask) {
  if (load_mask.size() != map.q.size()) throw GridMismatch("load mask does not match the power map");
  double n = 0, sum = 0, sum2 = 0;
  for (std::size_t c = 0; c < map.q.size(); ++c)
    if (load_mask[c]) {
      n += 1;
      sum += map.q[c];
    }
  if (n == 0) throw DisjointDomains("empty load mask");
  const double mean = sum / n;
  for (std::size_t c = 0; c < map.q.size(); ++c)
    if (load_mask[c]) sum2 += (map.q[c] - mean) * (map.q[c] - mean);
  if (!(mean > 0)) return 0.0;
  return std::sqrt(sum2 / n) / mean;
}

VfmResult vfm_average(const std::vector<PowerMap>& maps, const std::vector<double>& weights,
                      const std::vector<std::uint8_t>& load_mask) {
  if (maps.empty() || maps.size() != weights.size())
    throw InvalidArgument("VFM needs one weight per map");
  const auto& g = maps.front().grid;
  for (const auto& m : maps)
    if (m.grid.nx != g.nx || m.grid.ny != g.ny || m.grid.nz != g.nz || m.q.size() != g.cells() ||
        m.grid.dx != g.dx || m.grid.dy != g.dy || m.grid.dz != g.dz)
      throw GridMismatch("VFM maps must share one grid");
  double wsum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0)) throw InvalidArgument("VFM weights must be >= 0");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw InvalidArgument("VFM weights must sum to 1");

  VfmResult out;
  out.map.grid = g;
  out.map.q.assign(g.cells(), 0.0);
  for (std::size_t m = 0; m < maps.size(); ++m)
    for (std::size_t c = 0; c < g.cells(); ++c) out.map.q[c] += weights[m] * maps[m].q[c];
  out.map.normalize();
  out.uniformity = uniformity(out.map, load_mask);
  return out;
}

CoupledModel make_coupled_model(const Scene& scene, const MaterialLibrary& lib, const YeeGrid& grid,
                                const ThermalGrid& thermal, double cte_ref) {
  CoupledModel m;
  m.em = voxelize(scene, grid, lib);
  m.thermal = thermal_model(scene, lib, thermal);
  m.thermal.cte_ref = cte_ref;
  m.mapping = build_mapping(grid, thermal, m.em.load_mask);
  m.probe = scene.probe;
  m.open_end = scene.open_end;
  m.ambient_T = scene.ambient_T;
  spdlog::info("mapping: {} thermal cells, {} EM load cells, {} weights, max weight error {:.2e}",
               thermal.cells(), m.mapping.em_cells.size(), m.mapping.entries.size(),
               m.mapping.max_weight_error);
  return m;
}

CoupledModel make_coupled_model(const Scene& scene, const MaterialLibrary& lib, const YeeGrid& grid,
                                std::array<int, 3> thermal_refine, double cte_ref) {
  const VoxelModel em = voxelize(scene, grid, lib);
  return make_coupled_model(scene, lib, grid, coincident_thermal_grid(em, thermal_refine), cte_ref);
}

namespace {

struct EmSolve {
  std::vector<double> q_per_watt;  // thermal grid
  DielectricUpdate reference;      // load dielectric state at f0 when solved
  double uniformity = 0.0;
};

double relative_change(const DielectricUpdate& now, const DielectricUpdate& ref) {
  double worst = 0.0;
  for (std::size_t n = 0; n < now.eps_r.size(); ++n) {
    worst = std::max(worst, std::abs(now.eps_r[n] - ref.eps_r[n]) / ref.eps_r[n]);
    const double ds = std::abs(now.sigma[n] - ref.sigma[n]);
    if (ref.sigma[n] > 0)
      worst = std::max(worst, ds / ref.sigma[n]);
    else if (ds > 0)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

EmSolve solve_em(const CoupledModel& model, PowerMapProvider& provider, const CouplingPolicy& policy,
                 const ThermalState& state, const std::vector<const Material*>& mats) {
  const auto w = policy.normalized_weights();
  std::vector<PowerMap> maps;
  EmSolve out;
  for (std::size_t i = 0; i < policy.freqs.size(); ++i) {
    const double f = policy.freqs[i];
    CellMedium medium = build_medium(model.em, f, model.ambient_T);
    const auto up = map_dielectric(model.mapping, state.T, state.alpha, mats, f);
    apply_dielectric(model.mapping, up, medium);
    if (i == 0) out.reference = up;
    maps.push_back(provider.solve(medium, f));
  }
  const VfmResult avg = vfm_average(maps, w, model.em.load_mask);
  out.q_per_watt = map_power(model.mapping, avg.map);
  out.uniformity = avg.uniformity;
  return out;
}

SeriesRow summarize(const ThermalState& s) {
  SeriesRow r;
  const auto [lo, hi] = std::minmax_element(s.T.begin(), s.T.end());
  r.t_min = *lo;
  r.t_max = *hi;
  r.alpha_mean = std::accumulate(s.alpha.begin(), s.alpha.end(), 0.0) / s.alpha.size();
  r.sigma_max = *std::max_element(s.sigma_ind.begin(), s.sigma_ind.end());
  return r;
}

}  // namespace

RunResult run_coupled(const CoupledModel& model, PowerMapProvider& provider, const RunSpec& spec) {
  spec.policy.validate();
  if (!(spec.t_end > 0)) throw InvalidArgument("t_end must be positive");
  if (spec.profile) {
    if (spec.profile->empty()) throw EmptyProfile("closed-loop run needs a temperature profile");
    spec.controller.validate();
  }

  const double dt = spec.policy.dt_couple;
  const long steps = static_cast<long>(std::llround(spec.t_end / dt));
  if (std::abs(steps * dt - spec.t_end) > 1e-9 * spec.t_end)
    throw InvalidArgument("t_end must be a whole number of coupling intervals");

  const auto mats = model.thermal.cell_materials();
  const double h_max = 0.95 * max_stable_dt(model.thermal);
  const long n_sub = std::isfinite(h_max) ? std::max(1L, static_cast<long>(std::ceil(dt / h_max))) : 1L;
  const double h = dt / n_sub;

  RunResult res;
  res.state = initial_state(model.thermal, spec.initial_T.value_or(model.ambient_T));
  ControllerState ctrl = spec.controller;
  std::mt19937_64 rng(spec.sensor.seed);
  std::vector<double> source(model.thermal.grid.cells(), 0.0);

  EmSolve em;
  bool need_solve = true;
  long next_snapshot = 0;
  const long snap_every = spec.snapshot_interval > 0
                              ? std::max(1L, static_cast<long>(std::llround(spec.snapshot_interval / dt)))
                              : 0;
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    auto& s = res.state;
    if (snap_every && spec.on_snapshot && k == next_snapshot) {
      spec.on_snapshot(t, s);
      next_snapshot += snap_every;
    }
    SeriesRow row = summarize(s);
    row.t = t;
    row.measured = sensor_average(model.thermal, s, spec.sensor.noise_std, rng);
    row.target = spec.profile ? spec.profile->eval(t) : std::numeric_limits<double>::quiet_NaN();
    if (k == steps) {
      row.power = 0.0;
      row.em_solves = res.em_solves;
      res.series.push_back(row);
      break;
    }

    if (need_solve) {
      em = solve_em(model, provider, spec.policy, s, mats);
      ++res.em_solves;
      need_solve = false;
    }
    const double p = spec.profile ? pid_step(ctrl, row.target, row.measured, dt) : spec.schedule.eval(t);
    row.power = p;
    row.em_solves = res.em_solves;
    res.series.push_back(row);
    res.power_trace.emplace_back(t, p);

    for (std::size_t c = 0; c < source.size(); ++c) source[c] = p * em.q_per_watt[c];
    for (long j = 0; j < n_sub; ++j) {
      step_cure(model.thermal, s, h);
      step_heat(model.thermal, s, source, h);
    }
    s.time = (k + 1) * dt;

    const auto now = map_dielectric(model.mapping, s.T, s.alpha, mats, spec.policy.freqs.front());
    const double change = relative_change(now, em.reference);
    if (spec.policy.resolve_threshold == 0.0 || change > spec.policy.resolve_threshold)
      need_solve = true;
  }
  res.q_per_watt = em.q_per_watt;
  res.uniformity = em.uniformity;
  return res;
}

std::pair<std::vector<double>, std::vector<double>> step_test(const CoupledModel& model,
                                                              PowerMapProvider& provider,
                                                              const CouplingPolicy& policy,
                                                              double power, double duration) {
  RunSpec spec;
  spec.policy = policy;
  spec.t_end = duration;
  spec.schedule = PowerSchedule::constant(power);
  const RunResult r = run_coupled(model, provider, spec);
  std::vector<double> t, y;
  for (const auto& row : r.series) {
    t.push_back(row.t);
    y.push_back(row.measured);
  }
  return {t, y};
}

}  // namespace oven
