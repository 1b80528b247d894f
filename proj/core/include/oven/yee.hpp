#pragma once

#include <cstddef>
#include <vector>

#include "oven/scene.hpp"

namespace oven {

enum class Precision { single, dual };

// Dense 3-D array, last index fastest.
template <class T>
class Array3 {
 public:
  Array3() = default;
  Array3(int n0, int n1, int n2, T value = T{})
      : n0_(n0), n1_(n1), n2_(n2),
        data_(static_cast<std::size_t>(n0) * n1 * n2, value) {}

  T& operator()(int i, int j, int k) { return data_[offset(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }
  T* row(int i, int j) { return data_.data() + offset(i, j, 0); }
  const T* row(int i, int j) const { return data_.data() + offset(i, j, 0); }

  int n0() const { return n0_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return data_.size(); }
  std::vector<T>& flat() { return data_; }
  const std::vector<T>& flat() const { return data_; }

 private:
  std::size_t offset(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n1_ + j) * n2_ + k;
  }
  int n0_ = 0, n1_ = 0, n2_ = 0;
  std::vector<T> data_;
};

// Staggered field storage. Ex(i,j,k) lives at ((i+1/2)dx, j dy, k dz),
// Hx(i,j,k) at (i dx, (j+1/2)dy, (k+1/2)dz), and cyclically for y and z.
template <class Real>
struct FieldState {
  Array3<Real> ex, ey, ez;
  Array3<Real> hx, hy, hz;
  double time = 0.0;
  double dt = 0.0;
  long steps = 0;
};

// Largest stable leapfrog step times the Courant factor.
double stable_timestep(const YeeGrid& grid, double courant);

struct YeeOptions {
  double courant = 0.95;  // must not exceed 0.99
  // Open face at z = length, terminated by a graded lossy layer of air
  // (sigma on E, matched sigma* on H) backed by PEC. Lossy media cannot
  // add energy, so the termination stays stable for evanescent fields.
  bool open_end = true;
  int absorber_cells = 10;            // >= 4
  double absorber_reflection = 1e-6;  // normal-incidence design target
  bool track_energy = false;
  bool track_dissipation = false;
};

// Stack of Ez edges at node (i, j), k in [k_begin, k_end).
struct ProbeEdges {
  int i = 0;
  int j = 0;
  int k_begin = 0;
  int k_end = 0;
};

ProbeEdges probe_edges(const Probe& probe, const YeeGrid& grid);

template <class Real>
class YeeSolver {
 public:
  YeeSolver(const YeeGrid& grid, const CellMedium& medium, const YeeOptions& opts);

  void set_probe(const ProbeEdges& probe);

  // One leapfrog step: H to n+1/2, then E to n+1 with the impressed current
  // density probe_current (A/m^2, evaluated at n+1/2) on the probe edges.
  void step(double probe_current);

  const YeeGrid& grid() const { return grid_; }
  const FieldState<Real>& state() const { return state_; }
  FieldState<Real>& state() { return state_; }
  double dt() const { return state_.dt; }
  double time() const { return state_.time; }
  const ProbeEdges& probe() const { return probe_; }

  void set_dissipation_tracking(bool on) { opts_.track_dissipation = on; }

  // Discrete electromagnetic energy at the start of the last step,
  // sum eps E^n E^n / 2 + mu H^{n-1/2} H^{n+1/2} / 2, absorber included
  // (requires track_energy).
  double energy() const { return energy_; }
  // sum sigma E^2 V over the physical cells after the last step (requires
  // track_dissipation).
  double dissipation() const { return dissipation_; }
  // Power delivered by the probe current during the last step.
  double input_power() const { return input_power_; }
  // Poynting flux through the open face into the absorber at the start of
  // the last step, with H averaged to the E time level (requires
  // track_dissipation; zero for a closed cavity).
  double outgoing_flux() const { return flux_; }
  // Field arrays extend this many cells in z; larger than grid().nz when
  // the end is open.
  int nz_total() const { return nzt_; }

  // Throws NumericalBlowup if any component is non-finite or above 1e30.
  void check_finite() const;

 private:
  void update_h();
  void update_e();
  void save_flux_planes();
  double plane_flux() const;

  YeeGrid grid_;
  YeeGrid ext_;  // grid_ plus the absorber cells
  int nzt_ = 0;
  YeeOptions opts_;
  FieldState<Real> state_;
  CellMedium medium_;  // on ext_

  // Update coefficients per E edge: E <- ca E + cb curl(H).
  Array3<Real> cax_, cbx_, cay_, cby_, caz_, cbz_;
  // sigma * V per E edge, for the dissipation sum.
  Array3<Real> gx_, gy_, gz_;
  // H <- ha H - hb curl(E) dt/mu0 per z position: index k is the plane
  // k + 1/2 for Hx, Hy and the plane k for Hz.
  std::vector<Real> ha_half_, hb_half_, ha_node_, hb_node_;
  ProbeEdges probe_{};
  bool has_probe_ = false;

  std::vector<Real> h_prev_;  // Hx, Hy on the two flux planes before the H update
  double flux_ = 0.0;

  std::vector<double> partial_;
  double energy_ = 0.0;
  double dissipation_ = 0.0;
  double input_power_ = 0.0;
};

extern template class YeeSolver<float>;
extern template class YeeSolver<double>;

}  // namespace oven
