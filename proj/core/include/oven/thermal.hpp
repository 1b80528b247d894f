#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "oven/materials.hpp"
#include "oven/scene.hpp"
#include "oven/xmap.hpp"

namespace oven {

enum Face { x_lo = 0, x_hi, y_lo, y_hi, z_lo, z_hi };

// Finite-volume description of the load: per-cell material and per-face
// film coefficients (0 adiabatic, +inf fixed at ambient).
struct ThermalModel {
  ThermalGrid grid;
  std::vector<Material> materials;
  std::vector<std::uint16_t> material;  // per cell
  std::array<double, 6> h{};            // W/(m^2 K), indexed by Face
  double ambient_T = 293.15;
  double cte_ref = 0.0;                 // substrate expansion for the stress indicator

  const Material& material_of(std::size_t cell) const { return materials[material[cell]]; }
  std::vector<const Material*> cell_materials() const;
  void validate() const;
};

// Load of the scene on the given thermal grid. Materials come from the
// scene block containing each cell centre; the lowest-z face uses the
// scene contact conductance, all others h_conv.
ThermalModel thermal_model(const Scene& scene, const MaterialLibrary& lib, const ThermalGrid& grid);

struct EnergyLedger {
  double source = 0.0;     // J from the volumetric source
  double exotherm = 0.0;   // J released by cure
  double boundary = 0.0;   // J lost through the faces
};

struct ThermalState {
  std::vector<double> T;           // K
  std::vector<double> alpha;       // degree of cure
  std::vector<double> sigma_ind;   // Pa, refreshed by step_heat
  std::vector<double> pending;     // J/m^3 of exotherm awaiting release
  double time = 0.0;
  EnergyLedger ledger;
};

ThermalState initial_state(const ThermalModel& model, double T0, double alpha0 = 0.0);

// Largest explicit step keeping every cell update a convex combination.
double max_stable_dt(const ThermalModel& model);

// Explicit FV step of rho cp dT/dt = div(k grad T) + q plus the pending
// exotherm. Throws UnstableTimestep if dt exceeds max_stable_dt.
void step_heat(const ThermalModel& model, ThermalState& state, const std::vector<double>& q,
               double dt);

// Isothermal RK4 integration of the cure law over dt, sub-stepped so alpha
// moves by at most 0.01 per sub-step. Cells without kinetics are skipped.
void step_cure(const ThermalModel& model, ThermalState& state, double dt);

// Scalar thermoelastic mismatch indicator per cell.
double stress_indicator(const Material& mat, double T, double alpha, double cte_ref);
std::vector<double> stress_indicator(const ThermalModel& model, const ThermalState& state);

// Stored thermal energy sum rho cp T V.
double stored_energy(const ThermalModel& model, const ThermalState& state);

// Area-weighted mean over the top (+z) cell layer, plus optional noise.
double sensor_average(const ThermalModel& model, const ThermalState& state);
double sensor_average(const ThermalModel& model, const ThermalState& state, double noise_std,
                      std::mt19937_64& rng);

// Mean over a layer of cells at thermal index k (used for the bottom face).
double layer_average(const ThermalModel& model, const ThermalState& state, int k);

}  // namespace oven
