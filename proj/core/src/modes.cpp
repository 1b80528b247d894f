#include "oven/modes.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

using constants::c0;
using constants::pi;

void CavitySpec::validate() const {
  if (!(a > 0 && b > 0 && l_d > 0 && l_air > 0))
    throw InvalidArgument("cavity: a, b, l_d and l_air must be positive");
  if (!(eps_r >= 1.0)) throw InvalidArgument("cavity: eps_r must be >= 1");
}

double transverse_wavenumber(const CavitySpec& spec, int m, int n) {
  if (m < 1 || n < 1)
    throw InvalidArgument("TM indices m and n must both be >= 1");
  const double kx = m * pi / spec.a;
  const double ky = n * pi / spec.b;
  return std::sqrt(kx * kx + ky * ky);
}

double cutoff_frequency(const CavitySpec& spec, int m, int n) {
  return c0 * transverse_wavenumber(spec, m, n) / (2.0 * pi);
}

double dielectric_cutoff_frequency(const CavitySpec& spec, int m, int n) {
  return cutoff_frequency(spec, m, n) / std::sqrt(spec.eps_r);
}

double evanescent_rate(const CavitySpec& spec, int m, int n, double f) {
  const double kc = transverse_wavenumber(spec, m, n);
  const double k0 = 2.0 * pi * f / c0;
  if (!(k0 < kc))
    throw AboveCutoff(fmt::format(
        "f = {:.6g} Hz is not below the TM{}{} air cutoff {:.6g} Hz", f, m, n,
        cutoff_frequency(spec, m, n)));
  return std::sqrt(kc * kc - k0 * k0);
}

namespace {

struct Wavenumbers {
  double beta;
  double alpha;
};

Wavenumbers wavenumbers(const CavitySpec& spec, double kc2, double f) {
  const double k0 = 2.0 * pi * f / c0;
  const double k02 = k0 * k0;
  return {std::sqrt(std::max(spec.eps_r * k02 - kc2, 0.0)),
          std::sqrt(std::max(kc2 - k02, 0.0))};
}

double residual(const CavitySpec& spec, double kc2, double f) {
  const auto w = wavenumbers(spec, kc2, f);
  return w.beta * std::tan(w.beta * spec.l_d) - spec.eps_r * w.alpha;
}

// Frequency at which beta_d l_d equals a given phase.
double frequency_for_phase(const CavitySpec& spec, double kc2, double phase) {
  const double beta = phase / spec.l_d;
  return c0 * std::sqrt((beta * beta + kc2) / spec.eps_r) / (2.0 * pi);
}

}  // namespace

double resonance_residual(const CavitySpec& spec, int m, int n, double f) {
  const double kc = transverse_wavenumber(spec, m, n);
  return residual(spec, kc * kc, f);
}

std::vector<TmMode> solve_resonances(const CavitySpec& spec, int m, int n,
                                     double f_lo, double f_hi,
                                     const ResonanceSearch& search) {
  if (!(f_lo < f_hi)) throw InvalidArgument("resonance band needs f_lo < f_hi");
  if (!(search.grid_step > 0 && search.grid_step <= 1.0e6))
    throw InvalidArgument("bracketing grid step must lie in (0, 1 MHz]");

  const double kc = transverse_wavenumber(spec, m, n);
  const double kc2 = kc * kc;
  const double f_air = cutoff_frequency(spec, m, n);
  const double f_diel = f_air / std::sqrt(std::max(spec.eps_r, 1.0));

  const double lo = std::max(f_lo, f_diel);
  const double hi = std::min(f_hi, f_air);
  if (!(spec.eps_r > 1.0) || !(lo < hi))
    throw BandOutsideTrappedRegime(fmt::format(
        "band [{:.6g}, {:.6g}] Hz does not intersect the trapped regime "
        "({:.6g}, {:.6g}) Hz for TM{}{}",
        f_lo, f_hi, f_diel, f_air, m, n));

  // tan(beta l_d) is singular where beta l_d = pi/2 + k pi. Scan each
  // singularity-free sub-interval separately so sign changes across a pole
  // are never mistaken for roots.
  std::vector<double> edges{lo};
  {
    const double phase_lo = wavenumbers(spec, kc2, lo).beta * spec.l_d;
    const double phase_hi = wavenumbers(spec, kc2, hi).beta * spec.l_d;
    int k = static_cast<int>(std::ceil((phase_lo - pi / 2) / pi));
    for (;; ++k) {
      const double phase = pi / 2 + k * pi;
      if (phase >= phase_hi) break;
      if (phase <= phase_lo) continue;
      edges.push_back(frequency_for_phase(spec, kc2, phase));
    }
  }
  edges.push_back(hi);

  std::vector<TmMode> roots;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    // Stay strictly inside the open sub-interval.
    const double width = edges[s + 1] - edges[s];
    const double a = edges[s] + 1e-12 * width;
    const double b = edges[s + 1] - 1e-12 * width;
    const int cells = std::max(1, static_cast<int>(std::ceil((b - a) / search.grid_step)));
    double x0 = a;
    double g0 = residual(spec, kc2, x0);
    for (int c = 1; c <= cells; ++c) {
      const double x1 = (c == cells) ? b : a + (b - a) * c / cells;
      const double g1 = residual(spec, kc2, x1);
      if (g0 == 0.0 || (g0 < 0) != (g1 < 0)) {
        double l = x0, r = x1, gl = g0;
        if (g0 != 0.0) {
          while (r - l > search.relative_tol * r) {
            const double mid = 0.5 * (l + r);
            if (mid <= l || mid >= r) break;
            const double gm = residual(spec, kc2, mid);
            if (gm == 0.0) {
              l = r = mid;
              break;
            }
            if ((gm < 0) == (gl < 0)) {
              l = mid;
              gl = gm;
            } else {
              r = mid;
            }
          }
        }
        const double f = 0.5 * (l + r);
        const auto w = wavenumbers(spec, kc2, f);
        TmMode mode;
        mode.m = m;
        mode.n = n;
        mode.freq = f;
        mode.beta_d = w.beta;
        mode.alpha_air = w.alpha;
        mode.branch = static_cast<int>(std::floor(w.beta * spec.l_d / pi));
        if (roots.empty() || std::abs(roots.back().freq - f) > 1e-9 * f)
          roots.push_back(mode);
      }
      x0 = x1;
      g0 = g1;
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const TmMode& p, const TmMode& q) { return p.freq < q.freq; });
  return roots;
}

}  // namespace oven
