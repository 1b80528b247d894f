#include <cmath>
#include <gtest/gtest.h>

#include "oven/error.hpp"
#include "oven/scene.hpp"

using namespace oven;

namespace {
const MaterialLibrary kLib = MaterialLibrary::bundled();

Scene empty_box() {
  Scene s;
  s.cavity = {25.5e-3, 25.5e-3, 100e-3, 10e-3, 1.0};
  s.sample_region = {{0, 0, 0}, {25.5e-3, 25.5e-3, 110e-3}};
  s.probe = {12.75e-3, 12.75e-3, 5e-3};
  return s;
}
}  // namespace

TEST(AutoGrid, PrototypeResolution) {
  const Scene s = prototype_scene(true);
  const YeeGrid g = auto_grid(s, kLib, 10.8e9, {});
  const double lambda = 2.99792458e8 / (10.8e9 * std::sqrt(6.0));
  EXPECT_NEAR(lambda / 15, 0.755e-3, 0.001e-3);
  EXPECT_LE(g.dx, lambda / 15);
  EXPECT_LE(g.dy, lambda / 15);
  EXPECT_LE(g.dz, lambda / 15);
  EXPECT_GE(g.nx, 34);
  EXPECT_GE(g.ny, 34);
  EXPECT_GE(g.nz, 146);
  // Exact tiling.
  EXPECT_NEAR(g.nx * g.dx, 25.5e-3, 1e-15);
  EXPECT_NEAR(g.nz * g.dz, 110e-3, 1e-15);
  // The 0.5 mm sample spans two cells.
  EXPECT_LE(g.dz, 0.25e-3 + 1e-12);
}

TEST(AutoGrid, EmptyCavityUsesFreeSpaceWavelength) {
  const YeeGrid g = auto_grid(empty_box(), kLib, 9e9, {});
  const double h = 2.99792458e8 / 9e9 / 15;
  EXPECT_LE(g.dx, h);
  EXPECT_GT(g.dx, 0.8 * h);
}

TEST(AutoGrid, DoublingResolutionScalesCubically) {
  GridOptions a, b;
  a.cells_per_wavelength = 12;
  b.cells_per_wavelength = 24;
  b.cell_budget = 1e9;
  const double ratio = static_cast<double>(auto_grid(empty_box(), kLib, 9e9, b).cells()) /
                       auto_grid(empty_box(), kLib, 9e9, a).cells();
  EXPECT_NEAR(ratio, 8.0, 1.2);
}

TEST(AutoGrid, Errors) {
  GridOptions o;
  o.cells_per_wavelength = 9;
  EXPECT_THROW(auto_grid(empty_box(), kLib, 9e9, o), InvalidArgument);
  o.cells_per_wavelength = 15;
  o.cell_budget = 1000;
  EXPECT_THROW(auto_grid(empty_box(), kLib, 9e9, o), GridTooLarge);
}

TEST(Voxelize, UniformBlock) {
  Scene s = empty_box();
  s.blocks.push_back({s.cavity_box(), "filler"});
  const YeeGrid g = auto_grid(s, kLib, 9e9, {});
  const VoxelModel v = voxelize(s, g, kLib);
  const auto idx = v.material_index("filler");
  for (auto m : v.material) EXPECT_EQ(m, idx);
}

TEST(Voxelize, LaterBlockWins) {
  Scene s = empty_box();
  s.blocks.push_back({{{0, 0, 0}, {25.5e-3, 25.5e-3, 60e-3}}, "filler"});
  s.blocks.push_back({{{0, 0, 40e-3}, {25.5e-3, 25.5e-3, 80e-3}}, "solder-sample"});
  const YeeGrid g = auto_grid(s, kLib, 9e9, {});
  const VoxelModel v = voxelize(s, g, kLib);
  const auto solder = v.material_index("solder-sample");
  const auto filler = v.material_index("filler");
  const auto air = v.material_index("air");
  for (int k = 0; k < g.nz; ++k) {
    const double z = g.center(0, 0, k)[2];
    const auto m = v.material[g.index(3, 3, k)];
    if (z < 40e-3) EXPECT_EQ(m, filler);
    else if (z < 80e-3) EXPECT_EQ(m, solder);
    else EXPECT_EQ(m, air);
  }
}

TEST(Voxelize, LoadMaskVolumeAndTiling) {
  const Scene s = prototype_scene(true);
  const YeeGrid g = auto_grid(s, kLib, 10.8e9, {});
  const VoxelModel v = voxelize(s, g, kLib);
  const double vol = v.load_cells() * g.cell_volume();
  const double exact = s.sample_region.volume();
  // Within one cell layer on each face.
  const double layer = 2 * (s.sample_region.extent(0) * s.sample_region.extent(1) * g.dz +
                            s.sample_region.extent(0) * s.sample_region.extent(2) * g.dy +
                            s.sample_region.extent(1) * s.sample_region.extent(2) * g.dx);
  EXPECT_LE(std::abs(vol - exact), layer);
  EXPECT_NEAR(g.cells() * g.cell_volume(), s.cavity_box().volume(), 1e-12 * s.cavity_box().volume());
  const Box lb = v.load_box();
  EXPECT_NEAR(lb.lo[2], 100e-3, 1e-9);
  EXPECT_NEAR(lb.hi[2], 100.5e-3, 1e-9);
}

TEST(Voxelize, DeterministicAndIdempotent) {
  const Scene s = prototype_scene(true);
  const YeeGrid g = auto_grid(s, kLib, 10.8e9, {});
  const VoxelModel a = voxelize(s, g, kLib);
  const VoxelModel b = voxelize(s, g, kLib);
  EXPECT_EQ(a.material, b.material);
  EXPECT_EQ(a.load_mask, b.load_mask);
}

TEST(Voxelize, MaskVolumeConvergesWithRefinement) {
  Scene s = empty_box();
  s.sample_region = {{3.1e-3, 4.3e-3, 20.7e-3}, {17.9e-3, 19.1e-3, 61.3e-3}};
  double prev = 1e300;
  for (double cpw : {10.0, 20.0, 40.0}) {
    GridOptions o;
    o.cells_per_wavelength = cpw;
    o.align_to_blocks = false;
    o.cell_budget = 1e8;
    const YeeGrid g = auto_grid(s, kLib, 9e9, o);
    const VoxelModel v = voxelize(s, g, kLib);
    const double err = std::abs(v.load_cells() * g.cell_volume() - s.sample_region.volume());
    EXPECT_LE(err, prev * 1.01);
    prev = err;
  }
}

TEST(Scene, Validation) {
  Scene s = prototype_scene(true);
  EXPECT_NO_THROW(s.validate(kLib));
  s.blocks.back().material = "nope";
  EXPECT_THROW(s.validate(kLib), InvalidArgument);
  s = prototype_scene(true);
  s.blocks.back().box.hi[2] = 0.2;
  EXPECT_THROW(s.validate(kLib), InvalidArgument);
  s = prototype_scene(true);
  s.probe.x = 0;
  EXPECT_THROW(s.validate(kLib), InvalidArgument);
}

TEST(Medium, ConductivityFromLossTangent) {
  const Scene s = prototype_scene(true);
  const YeeGrid g = auto_grid(s, kLib, 10.8e9, {});
  const VoxelModel v = voxelize(s, g, kLib);
  const CellMedium m = build_medium(v, 10.424e9, 293.15);
  const std::size_t c = g.index(g.nx / 2, g.ny / 2, g.nz - 1);
  EXPECT_EQ(m.sigma[c], 0.0);
  EXPECT_EQ(m.eps_r[c], 1.0);
  const std::size_t d = g.index(g.nx / 2, g.ny / 2, 10);
  EXPECT_EQ(m.eps_r[d], 6.0);
  EXPECT_NEAR(m.sigma[d], 1.74e-3, 0.01e-3);
}
