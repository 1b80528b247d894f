#include "oven/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

std::vector<Vec3> default_monitors(const Scene& scene) {
  const double a = scene.cavity.a, b = scene.cavity.b, len = scene.cavity.length();
  // Off-centre transverse positions avoid the nodal lines of low-order
  // patterns; the z spread covers the filling and the air gap.
  return {{a / 6, b / 6, 0.30 * len},
          {a / 2, b / 6, 0.55 * len},
          {5 * a / 6, b / 2, 0.80 * len},
          {a / 3, 2 * b / 3, 0.45 * len}};
}

namespace {

template <class Real>
std::vector<SpectrumPoint> spectrum_impl(const Scene& scene, const MaterialLibrary& lib,
                                         const YeeGrid& grid, const SpectrumOptions& opts) {
  if (!(opts.f_span > 0 && opts.f_center - opts.f_span / 2 > 0))
    throw InvalidArgument("spectrum band must be positive");
  if (!(opts.df > 0)) throw InvalidArgument("spectrum df must be positive");
  if (!(opts.tail_taper > 0 && opts.tail_taper <= 1))
    throw InvalidArgument("spectrum tail_taper must be in (0, 1]");

  const VoxelModel model = voxelize(scene, grid, lib);
  const CellMedium medium = build_medium(model, opts.f_center, scene.ambient_T);
  YeeOptions yo;
  yo.courant = opts.courant;
  yo.open_end = scene.open_end;
  YeeSolver<Real> solver(grid, medium, yo);
  solver.set_probe(probe_edges(scene.probe, grid));

  const double dt = solver.dt();
  // Envelope exp(-((t - t0)/tau)^2) has a -20 dB full width of f_span.
  const double tau = 0.966 / opts.f_span;
  const double t0 = 4.0 * tau;
  const long n_steps = opts.n_steps > 0 ? opts.n_steps
                                        : static_cast<long>(std::ceil(opts.duration / dt));
  const long pulse_end = static_cast<long>(std::ceil(2.0 * t0 / dt));
  if (n_steps < pulse_end + 16)
    throw InvalidArgument(fmt::format(
        "spectrum needs more than {} steps for the pulse to decay", pulse_end + 16));

  std::vector<Vec3> mons = opts.monitors.empty() ? default_monitors(scene) : opts.monitors;
  struct Mon { int i, j, k; };
  std::vector<Mon> idx;
  for (const auto& p : mons) {
    Mon m{std::clamp(static_cast<int>(std::lround(p[0] / grid.dx)), 1, grid.nx - 1),
          std::clamp(static_cast<int>(std::lround(p[1] / grid.dy)), 1, grid.ny - 1),
          std::clamp(static_cast<int>(p[2] / grid.dz), 0, grid.nz - 1)};
    idx.push_back(m);
  }

  const long n_rec = n_steps - pulse_end;
  std::vector<std::vector<double>> rec(idx.size(), std::vector<double>(n_rec));
  const double w0 = 2.0 * constants::pi * opts.f_center;
  for (long n = 0; n < n_steps; ++n) {
    const double t = (n + 0.5) * dt;
    const double x = (t - t0) / tau;
    const double src = n < pulse_end ? opts.amplitude * std::exp(-x * x) * std::sin(w0 * (t - t0))
                                     : 0.0;
    solver.step(src);
    if (n >= pulse_end)
      for (std::size_t m = 0; m < idx.size(); ++m)
        rec[m][n - pulse_end] = solver.state().ez(idx[m].i, idx[m].j, idx[m].k);
  }

  // The record is a free ringdown, so a symmetric window would reshape the
  // line. Only the tail is tapered, to suppress truncation leakage.
  const long n_taper =
      std::clamp<long>(std::lround(opts.tail_taper * static_cast<double>(n_rec)), 1, n_rec);
  for (auto& r : rec)
    for (long n = n_rec - n_taper; n < n_rec; ++n)
      r[n] *= 0.5 * (1.0 + std::cos(constants::pi * (n - (n_rec - n_taper) + 1) / n_taper));

  const double f_lo = opts.f_center - opts.f_span / 2;
  const long n_freq = static_cast<long>(std::floor(opts.f_span / opts.df + 1e-9)) + 1;
  std::vector<SpectrumPoint> out(n_freq);
  for (long q = 0; q < n_freq; ++q) {
    const double f = f_lo + q * opts.df;
    const std::complex<double> w = std::polar(1.0, -2.0 * constants::pi * f * dt);
    double amp = 0.0;
    for (const auto& r : rec) {
      std::complex<double> acc{}, ph{1.0, 0.0};
      for (long n = 0; n < n_rec; ++n) {
        acc += r[n] * ph;
        ph *= w;
        if ((n & 1023) == 1023) ph /= std::abs(ph);
      }
      amp += std::abs(acc);
    }
    out[q] = {f, amp};
  }
  double peak = 0.0;
  for (const auto& p : out) peak = std::max(peak, p.amplitude);
  if (peak > 0)
    for (auto& p : out) p.amplitude /= peak;
  spdlog::debug("spectrum: {} steps, {} record samples, {} frequencies", n_steps, n_rec, n_freq);
  return out;
}

}  // namespace

std::vector<SpectrumPoint> run_spectrum(const Scene& scene, const MaterialLibrary& lib,
                                        const YeeGrid& grid, const SpectrumOptions& opts) {
  if (opts.precision == Precision::dual) return spectrum_impl<double>(scene, lib, grid, opts);
  return spectrum_impl<float>(scene, lib, grid, opts);
}

std::vector<Peak> find_peaks(const std::vector<SpectrumPoint>& s, const PeakOptions& opts) {
  std::vector<Peak> peaks;
  if (s.size() < 3) return peaks;
  double top = 0.0;
  for (const auto& p : s) top = std::max(top, p.amplitude);
  if (!(top > 0)) return peaks;

  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double y = s[i].amplitude;
    if (!(y > s[i - 1].amplitude && y >= s[i + 1].amplitude)) continue;
    if (y < opts.min_relative * top) continue;
    // Prominence against the lowest point on each side before a higher sample.
    double left = y, right = y;
    for (std::size_t l = i; l-- > 0;) {
      if (s[l].amplitude > y) break;
      left = std::min(left, s[l].amplitude);
    }
    // Ties stop the right-hand scan so equal twin tops keep only the right one.
    for (std::size_t r = i + 1; r < s.size(); ++r) {
      if (s[r].amplitude >= y) break;
      right = std::min(right, s[r].amplitude);
    }
    const double valley = std::max(left, right);
    if (valley > 0 && y / valley < opts.min_prominence) continue;

    const double ym = s[i - 1].amplitude, yp = s[i + 1].amplitude;
    const double denom = ym - 2 * y + yp;
    double shift = 0.0, amp = y;
    if (denom < 0) {
      shift = 0.5 * (ym - yp) / denom;
      amp = y - 0.25 * (ym - yp) * shift;
    }
    const double step = s[i + 1].freq - s[i].freq;
    peaks.push_back({s[i].freq + shift * step, amp, i});
  }
  return peaks;
}

std::vector<double> snap_to_peaks(const std::vector<Peak>& peaks, const std::vector<double>& nominal,
                                  double max_shift) {
  std::vector<double> out;
  for (const double f : nominal) {
    if (peaks.empty()) throw NumericalError("spectrum has no peaks to lock onto");
    const auto best = std::min_element(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
      return std::abs(a.freq - f) < std::abs(b.freq - f);
    });
    if (std::abs(best->freq - f) > max_shift * f)
      throw NumericalError(fmt::format("no spectrum peak within {:.3g} of {:.6g} Hz", max_shift, f));
    out.push_back(best->freq);
  }
  return out;
}

double estimate_q(const std::vector<SpectrumPoint>& s, double peak_freq) {
  const auto peaks = find_peaks(s, {0.0, 1.0});
  if (peaks.empty()) throw PeakOverlap("no resolvable peak in the spectrum");
  const auto best = std::min_element(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
    return std::abs(a.freq - peak_freq) < std::abs(b.freq - peak_freq);
  });
  const std::size_t i0 = best->index;

  auto crossing = [&](int dir, double level) {
    std::size_t i = i0;
    while (true) {
      if ((dir < 0 && i == 0) || (dir > 0 && i + 1 >= s.size()))
        throw PeakOverlap(fmt::format(
            "half-power contour of the peak at {:.6g} Hz reaches the spectrum edge", best->freq));
      const std::size_t j = dir < 0 ? i - 1 : i + 1;
      if (s[j].amplitude < level) {
        const double t = (s[i].amplitude - level) / (s[i].amplitude - s[j].amplitude);
        return s[i].freq + t * (s[j].freq - s[i].freq);
      }
      if (s[j].amplitude > s[i].amplitude)
        throw PeakOverlap(fmt::format(
            "peak at {:.6g} Hz merges with a neighbour above half power", best->freq));
      i = j;
    }
  };
  const double half = best->amplitude / std::sqrt(2.0);
  const double lo = crossing(-1, half);
  const double hi = crossing(+1, half);
  const double width = hi - lo;

  // A merged pair still has a single maximum but not a Lorentzian shape:
  // the width at amplitude/sqrt(5) must be close to twice the half-power
  // width, and the half-power points roughly centred on the peak.
  const double fifth = best->amplitude / std::sqrt(5.0);
  const double ratio = (crossing(+1, fifth) - crossing(-1, fifth)) / width;
  const double asym = ((hi - best->freq) - (best->freq - lo)) / width;
  if (ratio < 1.85 || ratio > 2.2 || std::abs(asym) > 0.15)
    throw PeakOverlap(fmt::format(
        "peak at {:.6g} Hz is not a single resonance (width ratio {:.3f}, asymmetry {:.3f})",
        best->freq, ratio, asym));
  return best->freq / width;
}

}  // namespace oven
