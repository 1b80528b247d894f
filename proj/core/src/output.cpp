#include "oven/output.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "oven/error.hpp"
#include "oven/version.hpp"

namespace oven {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& text) { return fnv1a64(text.data(), text.size()); }

std::string output_header(std::uint64_t hash) {
  return fmt::format("# oven {} config_hash={:016x}", kVersion, hash);
}

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void put(std::ofstream& out, const std::string& s) { out.write(s.data(), static_cast<std::streamsize>(s.size())); }

}  // namespace

std::string modes_csv(const std::vector<TmMode>& modes, std::uint64_t hash) {
  std::string s = output_header(hash) + "\nm,n,branch,freq_hz,beta_d,alpha_air\n";
  for (const auto& m : modes)
    s += fmt::format("{},{},{},{:.12g},{:.10g},{:.10g}\n", m.m, m.n, m.branch, m.freq, m.beta_d,
                     m.alpha_air);
  return s;
}

void write_modes_csv(const std::filesystem::path& path, const std::vector<TmMode>& modes,
                     std::uint64_t hash) {
  auto out = open(path);
  put(out, modes_csv(modes, hash));
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumPoint>& s,
                        std::uint64_t hash) {
  auto out = open(path);
  put(out, output_header(hash) + "\nfrequency_hz,amplitude\n");
  for (const auto& p : s) put(out, fmt::format("{:.10g},{:.10g}\n", p.freq, p.amplitude));
}

void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks,
                     std::uint64_t hash) {
  auto out = open(path);
  put(out, output_header(hash) + "\nfrequency_hz,amplitude\n");
  for (const auto& p : peaks) put(out, fmt::format("{:.10g},{:.10g}\n", p.freq, p.amplitude));
}

void write_run_summary(const std::filesystem::path& path, const std::vector<SeriesRow>& rows,
                       std::uint64_t hash) {
  auto out = open(path);
  put(out, output_header(hash) +
               "\nt_s,target_K,measured_K,power_W,min_T_K,max_T_K,mean_alpha,max_sigma_Pa,em_solves\n");
  for (const auto& r : rows) {
    const std::string target = std::isnan(r.target) ? std::string() : fmt::format("{:.10g}", r.target);
    put(out, fmt::format("{:.10g},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n", r.t, target,
                         r.measured, r.power, r.t_min, r.t_max, r.alpha_mean, r.sigma_max, r.em_solves));
  }
}

void write_snapshot_csv(const std::filesystem::path& path, const ThermalModel& model,
                        const ThermalState& state, std::uint64_t hash) {
  const auto& g = model.grid;
  auto out = open(path);
  put(out, output_header(hash) + fmt::format("\n# t_s={:.10g}\ni,j,k,x,y,z,T_K,alpha,sigma_Pa\n", state.time));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t c = g.index(i, j, k);
        const Vec3 p = g.center(i, j, k);
        put(out, fmt::format("{},{},{},{:.8g},{:.8g},{:.8g},{:.10g},{:.10g},{:.10g}\n", i, j, k, p[0],
                             p[1], p[2], state.T[c], state.alpha[c], state.sigma_ind[c]));
      }
}

namespace {

// Legacy ASCII structured points with cell data. The config hash goes in
// the title line, the only free-text slot the format allows.
void vtk_header(std::ofstream& out, std::uint64_t hash, std::array<int, 3> n, Vec3 origin, Vec3 h) {
  put(out, "# vtk DataFile Version 3.0\n");
  put(out, output_header(hash).substr(2) + "\n");
  put(out, "ASCII\nDATASET STRUCTURED_POINTS\n");
  put(out, fmt::format("DIMENSIONS {} {} {}\n", n[0] + 1, n[1] + 1, n[2] + 1));
  put(out, fmt::format("ORIGIN {:.10g} {:.10g} {:.10g}\n", origin[0], origin[1], origin[2]));
  put(out, fmt::format("SPACING {:.10g} {:.10g} {:.10g}\n", h[0], h[1], h[2]));
  put(out, fmt::format("CELL_DATA {}\n", static_cast<std::size_t>(n[0]) * n[1] * n[2]));
}

// VTK orders cells with x fastest; our arrays have z fastest.
template <class F>
void vtk_scalars(std::ofstream& out, const char* name, std::array<int, 3> n, F&& value) {
  put(out, fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name));
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) put(out, fmt::format("{:.10g}\n", value(i, j, k)));
}

}  // namespace

void write_snapshot_vtk(const std::filesystem::path& path, const ThermalModel& model,
                        const ThermalState& state, std::uint64_t hash) {
  const auto& g = model.grid;
  auto out = open(path);
  const std::array<int, 3> n{g.nx, g.ny, g.nz};
  vtk_header(out, hash, n, g.region.lo, {g.spacing(0), g.spacing(1), g.spacing(2)});
  vtk_scalars(out, "T_K", n, [&](int i, int j, int k) { return state.T[g.index(i, j, k)]; });
  vtk_scalars(out, "alpha", n, [&](int i, int j, int k) { return state.alpha[g.index(i, j, k)]; });
  vtk_scalars(out, "sigma_Pa", n, [&](int i, int j, int k) { return state.sigma_ind[g.index(i, j, k)]; });
}

void write_power_csv(const std::filesystem::path& path, const PowerMap& map,
                     const std::vector<std::uint8_t>& load_mask, std::uint64_t hash) {
  const auto& g = map.grid;
  auto out = open(path);
  put(out, output_header(hash) + "\ni,j,k,x,y,z,q_w_per_m3\n");
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t c = g.index(i, j, k);
        if (!load_mask.empty() && !load_mask[c]) continue;
        const Vec3 p = g.center(i, j, k);
        put(out, fmt::format("{},{},{},{:.8g},{:.8g},{:.8g},{:.10g}\n", i, j, k, p[0], p[1], p[2], map.q[c]));
      }
}

void write_power_vtk(const std::filesystem::path& path, const PowerMap& map, std::uint64_t hash) {
  const auto& g = map.grid;
  auto out = open(path);
  const std::array<int, 3> n{g.nx, g.ny, g.nz};
  vtk_header(out, hash, n, {0, 0, 0}, {g.dx, g.dy, g.dz});
  vtk_scalars(out, "q_w_per_m3", n, [&](int i, int j, int k) { return map.q[g.index(i, j, k)]; });
}

void write_voxel_vtk(const std::filesystem::path& path, const VoxelModel& model, std::uint64_t hash) {
  const auto& g = model.grid;
  auto out = open(path);
  const std::array<int, 3> n{g.nx, g.ny, g.nz};
  vtk_header(out, hash, n, {0, 0, 0}, {g.dx, g.dy, g.dz});
  vtk_scalars(out, "material", n, [&](int i, int j, int k) {
    return static_cast<double>(model.material[g.index(i, j, k)]);
  });
  vtk_scalars(out, "load", n, [&](int i, int j, int k) {
    return static_cast<double>(model.load_mask[g.index(i, j, k)]);
  });
}

std::string snapshot_stem(double t) { return fmt::format("snapshot_{:07.3f}", t); }

}  // namespace oven
