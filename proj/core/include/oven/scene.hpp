#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oven/materials.hpp"
#include "oven/modes.hpp"

namespace oven {

using Vec3 = std::array<double, 3>;

// Axis-aligned box [lo, hi) in metres.
struct Box {
  Vec3 lo{};
  Vec3 hi{};

  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const { return extent(0) * extent(1) * extent(2); }
  bool contains(const Vec3& p) const;
  bool inside(const Box& outer, double tol = 1e-12) const;
};

struct Block {
  Box box;
  std::string material;
};

// Coaxial probe on the shorted end wall, pointing along +z.
struct Probe {
  double x = 0.0;
  double y = 0.0;
  double length = 0.0;
};

struct Scene {
  CavitySpec cavity;
  std::vector<Block> blocks;  // later entries override earlier ones
  Box sample_region;          // thermophysical load
  Probe probe;
  double ambient_T = 293.15;
  double h_conv = 10.0;               // W/(m^2 K), exposed load faces
  double contact_conductance = 0.0;   // W/(m^2 K), load face at lowest z
  bool open_end = true;               // false: PEC wall at z = length
  std::string background = "air";

  Box cavity_box() const;
  const std::string& material_at(const Vec3& p) const;
  void validate(const MaterialLibrary& lib) const;
};

// Prototype oven: 25.5 x 25.5 x 110 mm guide, 100 mm eps_r = 6 filling and
// an optional 0.5 mm thick lossy sample flush against the dielectric face.
// The sample is a square of 13.5 mm side, close in area to a 15 mm disc.
Scene prototype_scene(bool with_sample = true);

// Uniform Yee lattice tiling the cavity.
struct YeeGrid {
  double dx = 0, dy = 0, dz = 0;
  int nx = 0, ny = 0, nz = 0;
  double cells_per_wavelength = 0;

  std::size_t cells() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny + j) * nz + k;
  }
  double cell_volume() const { return dx * dy * dz; }
  Vec3 center(int i, int j, int k) const {
    return {(i + 0.5) * dx, (j + 0.5) * dy, (k + 0.5) * dz};
  }
  double spacing(int axis) const { return axis == 0 ? dx : axis == 1 ? dy : dz; }
  int count(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
};

struct GridOptions {
  double cells_per_wavelength = 15.0;
  double cell_budget = 4.0e6;
  int min_cells_per_block = 2;
  bool align_to_blocks = true;
};

// Chooses per-axis cell counts so that the cell size resolves the shortest
// wavelength at f_max, every block spans at least two cells, and (when
// possible) block faces land on grid planes.
YeeGrid auto_grid(const Scene& scene, const MaterialLibrary& lib, double f_max,
                  const GridOptions& opts = {});

struct IndexBox {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};  // exclusive
  bool empty() const { return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2]; }
};

struct VoxelModel {
  YeeGrid grid;
  std::vector<Material> materials;
  std::vector<std::uint16_t> material;  // per cell, index into materials
  std::vector<std::uint8_t> load_mask;  // per cell

  std::size_t material_index(const std::string& name) const;
  std::size_t load_cells() const;
  IndexBox load_bounds() const;  // bounding index box of the load mask
  Box load_box() const;          // same, in metres
};

VoxelModel voxelize(const Scene& scene, const YeeGrid& grid,
                    const MaterialLibrary& lib);

// Cell-centred eps_r and conductivity used to build FDTD coefficients.
struct CellMedium {
  std::vector<double> eps_r;
  std::vector<double> sigma;
};

// Material properties evaluated at temperature t with zero cure, loss
// converted to conductivity at frequency f.
CellMedium build_medium(const VoxelModel& model, double f, double t);

}  // namespace oven
