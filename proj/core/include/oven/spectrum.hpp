#pragma once

#include <vector>

#include "oven/scene.hpp"
#include "oven/yee.hpp"

namespace oven {

struct SpectrumPoint {
  double freq;       // Hz
  double amplitude;  // relative, peak normalised to 1
};

struct SpectrumOptions {
  double f_center = 10.4e9;
  double f_span = 0.8e9;
  long n_steps = 0;           // 0: derive from duration
  double duration = 100e-9;   // s of simulated time when n_steps is 0
  double df = 1.0e6;          // output frequency spacing
  double amplitude = 1.0;     // source current density, A/m^2
  double courant = 0.95;
  Precision precision = Precision::single;
  // Fraction of the record, counted from its end, under a raised-cosine
  // taper. 1 tapers the whole record: lowest leakage, widest lines.
  double tail_taper = 1.0;
  // Monitor points (metres). Empty: a default set of off-axis Ez points.
  std::vector<Vec3> monitors;
};

// Gaussian-modulated sinusoid on the probe edges, tail-tapered DFT of the
// post-pulse Ez record at each monitor, summed magnitudes.
std::vector<SpectrumPoint> run_spectrum(const Scene& scene, const MaterialLibrary& lib,
                                        const YeeGrid& grid, const SpectrumOptions& opts);

std::vector<Vec3> default_monitors(const Scene& scene);

struct Peak {
  double freq;
  double amplitude;
  std::size_t index;  // sample index of the local maximum
};

struct PeakOptions {
  double min_relative = 0.05;  // minimum height relative to the global max
  double min_prominence = 1.05;  // peak / higher adjacent valley
};

// Local maxima, refined by a parabola through the three top samples.
std::vector<Peak> find_peaks(const std::vector<SpectrumPoint>& spectrum,
                             const PeakOptions& opts = {});

// Q = f / FWHM using the half-power (amplitude / sqrt 2) crossings around
// the peak nearest peak_freq. Throws PeakOverlap if the contour runs into
// a neighbouring peak or the spectrum edge, or if the line is visibly not
// a single Lorentzian (a merged pair).
double estimate_q(const std::vector<SpectrumPoint>& spectrum, double peak_freq);

// Replaces each nominal frequency by the nearest peak; throws
// NumericalError if that peak is farther than max_shift (relative).
std::vector<double> snap_to_peaks(const std::vector<Peak>& peaks, const std::vector<double>& nominal,
                                  double max_shift);

}  // namespace oven
