#pragma once

#include <vector>

#include "oven/scene.hpp"
#include "oven/yee.hpp"

namespace oven {

// Per-cell time-averaged dissipation density on the EM grid.
struct PowerMap {
  YeeGrid grid;
  std::vector<double> q;  // W/m^3, one entry per cell
  double p_total = 0.0;   // sum q V
  bool normalized = false;

  double total() const;  // recomputes sum q V
  void normalize();      // scale to p_total = 1 W; no-op for a zero map
};

struct HarmonicOptions {
  double f_drive = 10.4e9;
  double tol = 0.005;        // relative change between windows
  double balance_tol = 0.05; // |P_in - P_diss - P_rad| / P_in in the last window
  int ramp_periods = 100;    // raised-cosine turn-on, >= 50
  int window_periods = 10;
  int max_periods = 2000;
  double amplitude = 1.0;    // source current density, A/m^2
  double courant = 0.95;
  Precision precision = Precision::single;
};

struct HarmonicResult {
  PowerMap map;              // normalised per dissipated watt
  std::vector<double> e2;    // cell mean of <|E|^2>, same normalisation
  double scale = 0.0;        // factor applied to raw (unit-amplitude) q
  double p_in = 0.0;         // raw time-averaged powers over the last window
  double p_diss = 0.0;
  double p_rad = 0.0;
  int periods = 0;
  double f = 0.0;
};

// Continuous-wave drive at f_drive until the window-averaged dissipated and
// source powers are both stationary and balance, then one more window to
// accumulate per-edge <E^2>.
// A scene with no lossy cell returns a zero, unnormalised map.
HarmonicResult run_harmonic_steady(const YeeGrid& grid, const CellMedium& medium,
                                   const Probe& probe, bool open_end,
                                   const HarmonicOptions& opts);

HarmonicResult run_harmonic_steady(const Scene& scene, const MaterialLibrary& lib,
                                   const YeeGrid& grid, const HarmonicOptions& opts);

}  // namespace oven
