#include "oven/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

double PowerMap::total() const {
  double s = 0.0;
  for (double v : q) s += v;
  return s * grid.cell_volume();
}

void PowerMap::normalize() {
  p_total = total();
  if (!(p_total > 0)) return;
  const double k = 1.0 / p_total;
  for (double& v : q) v *= k;
  p_total = total();
  normalized = true;
}

namespace {

template <class Real>
void accumulate_sq(const Array3<Real>& e, std::vector<double>& acc) {
  const auto& v = e.flat();
  for (std::size_t n = 0; n < v.size(); ++n) acc[n] += static_cast<double>(v[n]) * v[n];
}

template <class Real>
HarmonicResult harmonic_impl(const YeeGrid& grid, const CellMedium& medium,
                             const Probe& probe, bool open_end, const HarmonicOptions& o) {
  if (!(o.f_drive > 0)) throw InvalidArgument("drive frequency must be positive");
  if (o.ramp_periods < 50) throw InvalidArgument("ramp must last at least 50 periods");
  if (o.window_periods < 1 || o.max_periods <= o.ramp_periods)
    throw InvalidArgument("inconsistent harmonic window settings");
  if (!(o.tol > 0)) throw InvalidArgument("convergence tolerance must be positive");
  if (!(o.balance_tol > 0)) throw InvalidArgument("balance tolerance must be positive");

  HarmonicResult res;
  res.f = o.f_drive;
  res.map.grid = grid;
  res.map.q.assign(grid.cells(), 0.0);
  res.e2.assign(grid.cells(), 0.0);

  const bool lossy = std::any_of(medium.sigma.begin(), medium.sigma.end(),
                                 [](double s) { return s > 0; });
  if (!lossy) {
    spdlog::warn("harmonic solve on a lossless medium: returning a zero map");
    return res;
  }

  // Shrink dt so that one period is a whole number of steps.
  const double period = 1.0 / o.f_drive;
  const double dt_max = stable_timestep(grid, o.courant);
  const long spp = static_cast<long>(std::ceil(period / dt_max));
  const double dt = period / spp;
  YeeOptions yo;
  yo.courant = o.courant * dt / dt_max;
  yo.open_end = open_end;
  yo.track_dissipation = true;
  YeeSolver<Real> solver(grid, medium, yo);
  solver.set_probe(probe_edges(probe, grid));

  const double w = 2.0 * constants::pi * o.f_drive;
  const double t_ramp = o.ramp_periods * period;
  long n = 0;
  auto advance = [&]() {
    const double t = (n + 0.5) * dt;
    const double r = t < t_ramp ? 0.5 * (1.0 - std::cos(constants::pi * t / t_ramp)) : 1.0;
    solver.step(o.amplitude * r * std::sin(w * t));
    ++n;
  };

  const long window = o.window_periods * spp;
  for (long s = 0; s < o.ramp_periods * spp; ++s) advance();
  int periods = o.ramp_periods;
  // Both the loss and the source power must settle, and the source must
  // balance the losses: on the crest of a beat between modes either power
  // alone can look stationary for a window while the stored energy moves.
  double prev = -1.0, prev_in = 0.0;
  bool converged = false;
  while (periods + o.window_periods <= o.max_periods) {
    double sum = 0.0, sum_in = 0.0, sum_rad = 0.0;
    for (long s = 0; s < window; ++s) {
      advance();
      sum += solver.dissipation();
      sum_in += solver.input_power();
      sum_rad += solver.outgoing_flux();
    }
    periods += o.window_periods;
    const double p = sum / window, p_in = sum_in / window, p_rad = sum_rad / window;
    spdlog::debug("harmonic window ending at period {}: P_diss {:.6g}, P_in {:.6g}, P_rad {:.6g}", periods, p,
                  p_in, p_rad);
    if (prev > 0 && std::abs(p - prev) <= o.tol * prev &&
        std::abs(p_in - prev_in) <= o.tol * std::abs(prev_in) &&
        std::abs(p_in - p - p_rad) <= o.balance_tol * std::abs(p_in)) {
      converged = true;
      break;
    }
    prev = p;
    prev_in = p_in;
  }
  if (!converged)
    throw NoConvergence(fmt::format(
        "dissipated power not stationary to {:.3g} after {} periods at {:.6g} Hz",
        o.tol, periods, o.f_drive));

  // Measurement window.
  const auto& st = solver.state();
  std::vector<double> ax(st.ex.size(), 0.0), ay(st.ey.size(), 0.0), az(st.ez.size(), 0.0);
  double p_in = 0.0, p_diss = 0.0, p_rad = 0.0;
  for (long s = 0; s < window; ++s) {
    advance();
    accumulate_sq(st.ex, ax);
    accumulate_sq(st.ey, ay);
    accumulate_sq(st.ez, az);
    p_in += solver.input_power();
    p_diss += solver.dissipation();
    p_rad += solver.outgoing_flux();
  }
  periods += o.window_periods;
  res.p_in = p_in / window;
  res.p_diss = p_diss / window;
  res.p_rad = p_rad / window;
  res.periods = periods;

  const int nx = grid.nx, ny = grid.ny, nz = grid.nz, nzt = solver.nz_total();
  const double inv = 1.0 / window;
  auto ex = [&](int i, int j, int k) { return ax[(static_cast<std::size_t>(i) * (ny + 1) + j) * (nzt + 1) + k]; };
  auto ey = [&](int i, int j, int k) { return ay[(static_cast<std::size_t>(i) * ny + j) * (nzt + 1) + k]; };
  auto ez = [&](int i, int j, int k) { return az[(static_cast<std::size_t>(i) * (ny + 1) + j) * nzt + k]; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const double sx = ex(i, j, k) + ex(i, j + 1, k) + ex(i, j, k + 1) + ex(i, j + 1, k + 1);
        const double sy = ey(i, j, k) + ey(i + 1, j, k) + ey(i, j, k + 1) + ey(i + 1, j, k + 1);
        const double sz = ez(i, j, k) + ez(i + 1, j, k) + ez(i, j + 1, k) + ez(i + 1, j + 1, k);
        const std::size_t c = grid.index(i, j, k);
        res.e2[c] = 0.25 * (sx + sy + sz) * inv;
        res.map.q[c] = medium.sigma[c] * res.e2[c];
      }

  const double raw = res.map.total();
  res.map.normalize();
  res.scale = raw > 0 ? 1.0 / raw : 0.0;
  for (double& v : res.e2) v *= res.scale;
  spdlog::info("harmonic {:.6g} Hz: {} periods, P_in {:.4g}, P_diss {:.4g}, P_rad {:.4g}",
               o.f_drive, periods, res.p_in, res.p_diss, res.p_rad);
  return res;
}

}  // namespace

HarmonicResult run_harmonic_steady(const YeeGrid& grid, const CellMedium& medium,
                                   const Probe& probe, bool open_end,
                                   const HarmonicOptions& opts) {
  if (opts.precision == Precision::dual)
    return harmonic_impl<double>(grid, medium, probe, open_end, opts);
  return harmonic_impl<float>(grid, medium, probe, open_end, opts);
}

HarmonicResult run_harmonic_steady(const Scene& scene, const MaterialLibrary& lib,
                                   const YeeGrid& grid, const HarmonicOptions& opts) {
  const VoxelModel model = voxelize(scene, grid, lib);
  const CellMedium medium = build_medium(model, opts.f_drive, scene.ambient_T);
  return run_harmonic_steady(grid, medium, scene.probe, scene.open_end, opts);
}

}  // namespace oven
