#include "oven/xmap.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/error.hpp"

namespace oven {

void ThermalGrid::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("thermal grid counts must be >= 1");
  for (int a = 0; a < 3; ++a)
    if (!(region.extent(a) > 0)) throw InvalidArgument("thermal region must have positive volume");
}

ThermalGrid coincident_thermal_grid(const VoxelModel& model, std::array<int, 3> refine) {
  const IndexBox b = model.load_bounds();
  if (b.empty()) throw DisjointDomains("load mask is empty on the EM grid");
  ThermalGrid t;
  t.region = model.load_box();
  t.nx = (b.hi[0] - b.lo[0]) * refine[0];
  t.ny = (b.hi[1] - b.lo[1]) * refine[1];
  t.nz = (b.hi[2] - b.lo[2]) * refine[2];
  t.validate();
  return t;
}

namespace {

struct Overlap {
  int index;
  double length;
};

// For each thermal interval along one axis, the EM intervals it overlaps.
std::vector<std::vector<Overlap>> axis_overlaps(double em_h, int em_n, double lo, double h, int n) {
  std::vector<std::vector<Overlap>> out(n);
  for (int t = 0; t < n; ++t) {
    const double a = lo + t * h;
    const double b = (t + 1 == n) ? lo + n * h : lo + (t + 1) * h;
    const int e0 = std::max(0, static_cast<int>(std::floor(a / em_h)) - 1);
    const int e1 = std::min(em_n - 1, static_cast<int>(std::floor(b / em_h)) + 1);
    for (int e = e0; e <= e1; ++e) {
      const double len = std::min(b, (e + 1) * em_h) - std::max(a, e * em_h);
      // Ignore slivers created by rounding of coincident planes.
      if (len > 1e-12 * h) out[t].push_back({e, len});
    }
  }
  return out;
}

}  // namespace

Mapping build_mapping(const YeeGrid& em, const ThermalGrid& thermal,
                      const std::vector<std::uint8_t>& load_mask) {
  thermal.validate();
  if (load_mask.size() != em.cells()) throw InvalidArgument("load mask size does not match the EM grid");
  if (std::none_of(load_mask.begin(), load_mask.end(), [](std::uint8_t m) { return m != 0; }))
    throw DisjointDomains("load mask is empty on the EM grid");

  Mapping map;
  map.em = em;
  map.thermal = thermal;
  std::array<std::vector<std::vector<Overlap>>, 3> ov;
  for (int a = 0; a < 3; ++a)
    ov[a] = axis_overlaps(em.spacing(a), em.count(a), thermal.region.lo[a],
                          thermal.spacing(a), thermal.count(a));

  map.offsets.reserve(thermal.cells() + 1);
  map.offsets.push_back(0);
  const double vt = thermal.cell_volume();
  for (int i = 0; i < thermal.nx; ++i)
    for (int j = 0; j < thermal.ny; ++j)
      for (int k = 0; k < thermal.nz; ++k) {
        double sum = 0.0;
        for (const auto& ox : ov[0][i])
          for (const auto& oy : ov[1][j])
            for (const auto& oz : ov[2][k]) {
              const std::size_t c = em.index(ox.index, oy.index, oz.index);
              if (!load_mask[c]) continue;
              const double w = ox.length * oy.length * oz.length;
              map.entries.push_back({c, w});
              sum += w;
            }
        map.offsets.push_back(map.entries.size());
        map.max_weight_error = std::max(map.max_weight_error, std::abs(sum - vt) / vt);
      }
  if (map.entries.empty()) throw DisjointDomains("thermal region does not overlap the EM load cells");

  // Reverse table, grouped by EM cell in ascending order.
  std::vector<std::size_t> em_cells;
  em_cells.reserve(map.entries.size());
  for (const auto& e : map.entries) em_cells.push_back(e.cell);
  std::sort(em_cells.begin(), em_cells.end());
  em_cells.erase(std::unique(em_cells.begin(), em_cells.end()), em_cells.end());
  map.em_cells = em_cells;

  std::vector<std::size_t> count(em_cells.size() + 1, 0);
  auto slot = [&](std::size_t c) {
    return static_cast<std::size_t>(std::lower_bound(em_cells.begin(), em_cells.end(), c) -
                                    em_cells.begin());
  };
  for (const auto& e : map.entries) ++count[slot(e.cell) + 1];
  for (std::size_t n = 1; n < count.size(); ++n) count[n] += count[n - 1];
  map.rev_offsets = count;
  map.rev_entries.resize(map.entries.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (std::size_t t = 0; t < thermal.cells(); ++t)
    for (std::size_t n = map.offsets[t]; n < map.offsets[t + 1]; ++n) {
      const auto& e = map.entries[n];
      map.rev_entries[fill[slot(e.cell)]++] = {t, e.weight};
    }
  return map;
}

std::vector<double> map_power(const Mapping& mapping, const std::vector<double>& q_em) {
  if (q_em.size() != mapping.em.cells()) throw GridMismatch("power map grid does not match the mapping");
  const std::size_t nt = mapping.thermal.cells();
  const double vt = mapping.thermal.cell_volume();
  std::vector<double> q(nt, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    double s = 0.0;
    for (std::size_t n = mapping.offsets[t]; n < mapping.offsets[t + 1]; ++n)
      s += mapping.entries[n].weight * q_em[mapping.entries[n].cell];
    q[t] = s / vt;
  }
  return q;
}

std::vector<double> map_power(const Mapping& mapping, const PowerMap& power) {
  const auto& g = power.grid;
  if (g.nx != mapping.em.nx || g.ny != mapping.em.ny || g.nz != mapping.em.nz)
    throw GridMismatch("power map grid does not match the mapping");
  return map_power(mapping, power.q);
}

DielectricUpdate map_dielectric(const Mapping& mapping, const std::vector<double>& T,
                                const std::vector<double>& alpha,
                                const std::vector<const Material*>& cell_material, double f) {
  const std::size_t nt = mapping.thermal.cells();
  if (T.size() != nt || alpha.size() != nt || cell_material.size() != nt)
    throw GridMismatch("thermal fields do not match the mapping");
  std::vector<double> eps_t(nt), sig_t(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const EmProperties p = effective_em(*cell_material[t], T[t], alpha[t]);
    eps_t[t] = p.eps_r;
    sig_t[t] = equivalent_conductivity(p, f);
  }
  DielectricUpdate up;
  const std::size_t ne = mapping.em_cells.size();
  up.eps_r.resize(ne);
  up.sigma.resize(ne);
  for (std::size_t n = 0; n < ne; ++n) {
    double w = 0.0, e = 0.0, s = 0.0;
    for (std::size_t r = mapping.rev_offsets[n]; r < mapping.rev_offsets[n + 1]; ++r) {
      const auto& en = mapping.rev_entries[r];
      w += en.weight;
      e += en.weight * eps_t[en.cell];
      s += en.weight * sig_t[en.cell];
    }
    up.eps_r[n] = e / w;
    up.sigma[n] = s / w;
  }
  return up;
}

void apply_dielectric(const Mapping& mapping, const DielectricUpdate& update, CellMedium& medium) {
  if (update.eps_r.size() != mapping.em_cells.size() || medium.eps_r.size() != mapping.em.cells())
    throw GridMismatch("dielectric update does not match the mapping");
  for (std::size_t n = 0; n < mapping.em_cells.size(); ++n) {
    medium.eps_r[mapping.em_cells[n]] = update.eps_r[n];
    medium.sigma[mapping.em_cells[n]] = update.sigma[n];
  }
}

}  // namespace oven
