#pragma once

#include <vector>

namespace oven {

// Rectangular guide of cross-section a x b, shorted at z = 0, filled with
// dielectric over [0, l_d] and air over [l_d, l_d + l_air].
struct CavitySpec {
  double a = 0.0;
  double b = 0.0;
  double l_d = 0.0;
  double l_air = 0.0;
  double eps_r = 1.0;

  double length() const { return l_d + l_air; }
  void validate() const;
};

// A TM_mn resonance trapped in the dielectric section.
struct TmMode {
  int m = 0;
  int n = 0;
  int branch = 0;    // root count upward from the dielectric-section cutoff
  double freq = 0;      // Hz
  double beta_d = 0;    // rad/m
  double alpha_air = 0;  // Np/m
};

double transverse_wavenumber(const CavitySpec& spec, int m, int n);

// Cutoff of the air-filled cross-section for the (m, n) transverse pattern.
double cutoff_frequency(const CavitySpec& spec, int m, int n);

// Cutoff of the dielectric-filled section, cutoff / sqrt(eps_r).
double dielectric_cutoff_frequency(const CavitySpec& spec, int m, int n);

// Attenuation constant sqrt(kc^2 - k0^2) of the (m, n) field in the air
// section. Throws AboveCutoff when f is not below cutoff.
double evanescent_rate(const CavitySpec& spec, int m, int n, double f);

// Matching residual g(f) = beta_d tan(beta_d l_d) - eps_r alpha for a
// shorted dielectric section facing a semi-infinite evanescent air guide.
double resonance_residual(const CavitySpec& spec, int m, int n, double f);

struct ResonanceSearch {
  double grid_step = 1.0e6;       // Hz, bracketing scan spacing (<= 1 MHz)
  double relative_tol = 1.0e-13;  // bisection stop (tighter than 1e-9)
};

// All trapped TM_mn roots in [f_lo, f_hi], ascending. Throws
// BandOutsideTrappedRegime when the band misses the open interval between
// the dielectric and air cutoffs.
std::vector<TmMode> solve_resonances(const CavitySpec& spec, int m, int n,
                                     double f_lo, double f_hi,
                                     const ResonanceSearch& search = {});

}  // namespace oven
