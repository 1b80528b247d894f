#include "oven/scene.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

bool Box::contains(const Vec3& p) const {
  for (int a = 0; a < 3; ++a)
    if (!(p[a] >= lo[a] && p[a] < hi[a])) return false;
  return true;
}

bool Box::inside(const Box& outer, double tol) const {
  for (int a = 0; a < 3; ++a) {
    const double scale = std::max(1.0, std::abs(outer.extent(a)));
    if (lo[a] < outer.lo[a] - tol * scale || hi[a] > outer.hi[a] + tol * scale)
      return false;
  }
  return true;
}

Box Scene::cavity_box() const {
  return {{0.0, 0.0, 0.0}, {cavity.a, cavity.b, cavity.length()}};
}

const std::string& Scene::material_at(const Vec3& p) const {
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
    if (it->box.contains(p)) return it->material;
  return background;
}

void Scene::validate(const MaterialLibrary& lib) const {
  cavity.validate();
  const Box outer = cavity_box();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    if (!(blk.box.volume() > 0))
      throw InvalidArgument(fmt::format("block {} has non-positive volume", i));
    if (!blk.box.inside(outer))
      throw InvalidArgument(fmt::format("block {} extends outside the cavity", i));
    if (!lib.contains(blk.material))
      throw InvalidArgument(
          fmt::format("block {} references undefined material '{}'", i, blk.material));
  }
  if (!lib.contains(background))
    throw InvalidArgument(fmt::format("undefined background material '{}'", background));
  for (int a = 0; a < 3; ++a)
    if (!(sample_region.extent(a) > 0))
      throw InvalidArgument("sample region must have positive volume");
  if (!sample_region.inside(outer))
    throw InvalidArgument("sample region extends outside the cavity");
  if (!(probe.x > 0 && probe.x < cavity.a && probe.y > 0 && probe.y < cavity.b))
    throw InvalidArgument("probe must sit in the interior of the z = 0 end wall");
  if (!(probe.length > 0 && probe.length < cavity.length()))
    throw InvalidArgument("probe length must be positive and shorter than the cavity");
  if (!(ambient_T > 0)) throw InvalidArgument("ambient temperature must be > 0");
  if (h_conv < 0 || contact_conductance < 0)
    throw InvalidArgument("convective coefficients must be >= 0");
}

Scene prototype_scene(bool with_sample) {
  Scene s;
  s.cavity = {25.5e-3, 25.5e-3, 100e-3, 10e-3, 6.0};
  s.blocks.push_back({{{0, 0, 0}, {25.5e-3, 25.5e-3, 100e-3}}, "filler"});
  const Box sample{{6.0e-3, 6.0e-3, 100e-3}, {19.5e-3, 19.5e-3, 100.5e-3}};
  if (with_sample) {
    s.blocks.push_back({sample, "solder-sample"});
    s.sample_region = sample;
  } else {
    // Without a sample the load is the filling itself.
    s.sample_region = s.blocks.front().box;
  }
  s.probe = {12.75e-3, 12.75e-3, 5.0e-3};
  return s;
}

namespace {

bool aligned(double coord, double h) {
  const double r = coord / h;
  return std::abs(r - std::round(r)) < 1e-6;
}

}  // namespace

YeeGrid auto_grid(const Scene& scene, const MaterialLibrary& lib, double f_max,
                  const GridOptions& opts) {
  if (!(opts.cells_per_wavelength >= 10))
    throw InvalidArgument("cells_per_wavelength must be >= 10");
  if (!(f_max > 0)) throw InvalidArgument("f_max must be positive");

  double eps_max = lib.at(scene.background).eps_r;
  for (const auto& blk : scene.blocks)
    eps_max = std::max(eps_max, lib.at(blk.material).eps_r);
  const double lambda_min = constants::c0 / (f_max * std::sqrt(eps_max));
  const double h_max = lambda_min / opts.cells_per_wavelength;

  const Box outer = scene.cavity_box();
  std::vector<Box> boxes;
  for (const auto& blk : scene.blocks) boxes.push_back(blk.box);
  boxes.push_back(scene.sample_region);

  YeeGrid g;
  g.cells_per_wavelength = opts.cells_per_wavelength;
  std::array<int, 3> counts{};
  for (int a = 0; a < 3; ++a) {
    const double len = outer.extent(a);
    int n = static_cast<int>(std::ceil(len / h_max - 1e-9));
    for (const auto& bx : boxes) {
      const double e = bx.extent(a);
      if (e > 0 && e < len * (1 - 1e-12)) {
        n = std::max(n, static_cast<int>(
                            std::ceil(opts.min_cells_per_block * len / e - 1e-9)));
      }
    }
    if (opts.align_to_blocks) {
      const int n_hi = n + std::max(8, n / 2);
      for (int cand = n; cand <= n_hi; ++cand) {
        const double h = len / cand;
        const bool ok = std::all_of(boxes.begin(), boxes.end(), [&](const Box& bx) {
          return aligned(bx.lo[a], h) && aligned(bx.hi[a], h);
        });
        if (ok) {
          n = cand;
          break;
        }
      }
    }
    counts[a] = n;
  }
  g.nx = counts[0];
  g.ny = counts[1];
  g.nz = counts[2];
  g.dx = outer.extent(0) / g.nx;
  g.dy = outer.extent(1) / g.ny;
  g.dz = outer.extent(2) / g.nz;

  const double total = static_cast<double>(g.nx) * g.ny * g.nz;
  if (total > opts.cell_budget)
    throw GridTooLarge(fmt::format("grid {}x{}x{} = {:.3g} cells exceeds budget {:.3g}",
                                   g.nx, g.ny, g.nz, total, opts.cell_budget));
  return g;
}

std::size_t VoxelModel::material_index(const std::string& name) const {
  for (std::size_t i = 0; i < materials.size(); ++i)
    if (materials[i].name == name) return i;
  throw InvalidArgument(fmt::format("material '{}' not present in voxel model", name));
}

std::size_t VoxelModel::load_cells() const {
  return static_cast<std::size_t>(std::count(load_mask.begin(), load_mask.end(), 1));
}

IndexBox VoxelModel::load_bounds() const {
  IndexBox b{{grid.nx, grid.ny, grid.nz}, {0, 0, 0}};
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (int k = 0; k < grid.nz; ++k) {
        if (!load_mask[grid.index(i, j, k)]) continue;
        const int idx[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
          b.lo[a] = std::min(b.lo[a], idx[a]);
          b.hi[a] = std::max(b.hi[a], idx[a] + 1);
        }
      }
  return b;
}

Box VoxelModel::load_box() const {
  const IndexBox ib = load_bounds();
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = ib.lo[a] * grid.spacing(a);
    b.hi[a] = ib.hi[a] * grid.spacing(a);
  }
  return b;
}

VoxelModel voxelize(const Scene& scene, const YeeGrid& grid,
                    const MaterialLibrary& lib) {
  VoxelModel vm;
  vm.grid = grid;
  auto slot = [&](const std::string& name) -> std::uint16_t {
    for (std::size_t i = 0; i < vm.materials.size(); ++i)
      if (vm.materials[i].name == name) return static_cast<std::uint16_t>(i);
    vm.materials.push_back(lib.at(name));
    return static_cast<std::uint16_t>(vm.materials.size() - 1);
  };
  slot(scene.background);
  for (const auto& blk : scene.blocks) slot(blk.material);

  vm.material.assign(grid.cells(), 0);
  vm.load_mask.assign(grid.cells(), 0);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (int k = 0; k < grid.nz; ++k) {
        const Vec3 c = grid.center(i, j, k);
        const std::size_t id = grid.index(i, j, k);
        vm.material[id] = slot(scene.material_at(c));
        vm.load_mask[id] = scene.sample_region.contains(c) ? 1 : 0;
      }
  return vm;
}

CellMedium build_medium(const VoxelModel& model, double f, double t) {
  std::vector<EmProperties> props;
  props.reserve(model.materials.size());
  for (const auto& m : model.materials) props.push_back(effective_em(m, t, 0.0));
  CellMedium med;
  med.eps_r.resize(model.grid.cells());
  med.sigma.resize(model.grid.cells());
  for (std::size_t c = 0; c < model.grid.cells(); ++c) {
    const auto& p = props[model.material[c]];
    med.eps_r[c] = p.eps_r;
    med.sigma[c] = equivalent_conductivity(p, f);
  }
  return med;
}

}  // namespace oven
