#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "oven/harmonic.hpp"
#include "oven/scene.hpp"

namespace oven {

// Structured thermal mesh over an axis-aligned load region.
struct ThermalGrid {
  Box region;
  int nx = 1, ny = 1, nz = 1;

  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny + j) * nz + k;
  }
  double spacing(int axis) const {
    const int n = axis == 0 ? nx : axis == 1 ? ny : nz;
    return region.extent(axis) / n;
  }
  int count(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  Vec3 center(int i, int j, int k) const {
    return {region.lo[0] + (i + 0.5) * spacing(0), region.lo[1] + (j + 0.5) * spacing(1),
            region.lo[2] + (k + 0.5) * spacing(2)};
  }
  void validate() const;
};

// Thermal grid over the voxelised load with `refine` thermal cells per EM
// cell along each axis (the default overlay coincides with the EM cells).
ThermalGrid coincident_thermal_grid(const VoxelModel& model, std::array<int, 3> refine = {1, 1, 1});

struct MapEntry {
  std::size_t cell;
  double weight;  // overlap volume, m^3
};

// Overlap tables between EM load cells and thermal cells.
struct Mapping {
  YeeGrid em;
  ThermalGrid thermal;
  // Thermal cell t -> EM cells in [offsets[t], offsets[t+1]).
  std::vector<std::size_t> offsets;
  std::vector<MapEntry> entries;
  // EM load cells (ascending), and for each of them the thermal cells
  // overlapping it in [rev_offsets[n], rev_offsets[n+1]).
  std::vector<std::size_t> em_cells;
  std::vector<std::size_t> rev_offsets;
  std::vector<MapEntry> rev_entries;
  double max_weight_error = 0.0;  // max relative |sum w - V| over thermal cells
};

Mapping build_mapping(const YeeGrid& em, const ThermalGrid& thermal,
                      const std::vector<std::uint8_t>& load_mask);

// Per-thermal-cell source density (sum w q_EM) / V.
std::vector<double> map_power(const Mapping& mapping, const PowerMap& power);
std::vector<double> map_power(const Mapping& mapping, const std::vector<double>& q_em);

// Dielectric state of the EM load cells (parallel to Mapping::em_cells).
struct DielectricUpdate {
  std::vector<double> eps_r;
  std::vector<double> sigma;
};

// Volume-weighted averages over overlapping thermal cells of eps_r_eff and
// sigma_eff at frequency f. cell_material holds the material of each
// thermal cell.
DielectricUpdate map_dielectric(const Mapping& mapping, const std::vector<double>& T,
                                const std::vector<double>& alpha,
                                const std::vector<const Material*>& cell_material, double f);

// Writes the update into the load cells of medium.
void apply_dielectric(const Mapping& mapping, const DielectricUpdate& update, CellMedium& medium);

}  // namespace oven
