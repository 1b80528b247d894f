#include "oven/thermal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

std::vector<const Material*> ThermalModel::cell_materials() const {
  std::vector<const Material*> out(material.size());
  for (std::size_t c = 0; c < material.size(); ++c) out[c] = &materials[material[c]];
  return out;
}

void ThermalModel::validate() const {
  grid.validate();
  if (material.size() != grid.cells()) throw InvalidArgument("thermal material array size mismatch");
  for (const auto idx : material)
    if (idx >= materials.size()) throw InvalidArgument("thermal material index out of range");
  for (const double v : h)
    if (!(v >= 0)) throw InvalidArgument("film coefficients must be >= 0");
  if (!(ambient_T > 0)) throw InvalidArgument("ambient temperature must be > 0");
}

ThermalModel thermal_model(const Scene& scene, const MaterialLibrary& lib, const ThermalGrid& grid) {
  grid.validate();
  ThermalModel m;
  m.grid = grid;
  m.ambient_T = scene.ambient_T;
  m.h = {scene.h_conv, scene.h_conv, scene.h_conv, scene.h_conv,
         scene.contact_conductance, scene.h_conv};
  m.material.resize(grid.cells());
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (int k = 0; k < grid.nz; ++k) {
        const std::string& name = scene.material_at(grid.center(i, j, k));
        auto it = std::find_if(m.materials.begin(), m.materials.end(),
                               [&](const Material& x) { return x.name == name; });
        if (it == m.materials.end()) {
          m.materials.push_back(lib.at(name));
          it = m.materials.end() - 1;
        }
        m.material[grid.index(i, j, k)] = static_cast<std::uint16_t>(it - m.materials.begin());
      }
  m.validate();
  return m;
}

ThermalState initial_state(const ThermalModel& model, double T0, double alpha0) {
  if (!(T0 > 0)) throw InvalidArgument("initial temperature must be > 0");
  if (!(alpha0 >= 0 && alpha0 <= 1)) throw InvalidArgument("initial cure must lie in [0, 1]");
  ThermalState s;
  const std::size_t n = model.grid.cells();
  s.T.assign(n, T0);
  s.alpha.assign(n, alpha0);
  s.pending.assign(n, 0.0);
  s.sigma_ind = stress_indicator(model, s);
  return s;
}

namespace {

// Conductance between two cells across a shared face of area `area`.
double link(double k1, double k2, double d, double area) {
  // Harmonic mean of the two half-cell resistances.
  return area / (0.5 * d / k1 + 0.5 * d / k2);
}

// Conductance from a boundary cell to ambient through a film h.
double film(double h, double k, double d, double area) {
  if (h <= 0) return 0.0;
  if (std::isinf(h)) return area * 2.0 * k / d;
  return area / (1.0 / h + 0.5 * d / k);
}

struct Geometry {
  double d[3];
  double area[3];  // area of the face normal to each axis
  double vol;
};

Geometry geometry(const ThermalGrid& g) {
  Geometry geo;
  for (int a = 0; a < 3; ++a) geo.d[a] = g.spacing(a);
  geo.area[0] = geo.d[1] * geo.d[2];
  geo.area[1] = geo.d[0] * geo.d[2];
  geo.area[2] = geo.d[0] * geo.d[1];
  geo.vol = geo.d[0] * geo.d[1] * geo.d[2];
  return geo;
}

}  // namespace

double max_stable_dt(const ThermalModel& model) {
  const auto& g = model.grid;
  const Geometry geo = geometry(g);
  double best = std::numeric_limits<double>::infinity();
  const int n[3] = {g.nx, g.ny, g.nz};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t c = g.index(i, j, k);
        const Material& m = model.material_of(c);
        const int idx[3] = {i, j, k};
        double sum = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int side = 0; side < 2; ++side) {
            const int nb = idx[a] + (side ? 1 : -1);
            if (nb < 0 || nb >= n[a]) {
              sum += film(model.h[2 * a + side], m.conductivity_thermal, geo.d[a], geo.area[a]);
            } else {
              int q[3] = {i, j, k};
              q[a] = nb;
              const Material& o = model.material_of(g.index(q[0], q[1], q[2]));
              sum += link(m.conductivity_thermal, o.conductivity_thermal, geo.d[a], geo.area[a]);
            }
          }
        if (sum > 0) best = std::min(best, m.density * m.heat_capacity * geo.vol / sum);
      }
  return best;
}

void step_heat(const ThermalModel& model, ThermalState& s, const std::vector<double>& q, double dt) {
  const auto& g = model.grid;
  const std::size_t nc = g.cells();
  if (!(dt > 0)) throw InvalidArgument("thermal dt must be positive");
  if (q.size() != nc || s.T.size() != nc) throw GridMismatch("source does not match the thermal grid");

  const Geometry geo = geometry(g);
  const int n[3] = {g.nx, g.ny, g.nz};
  std::vector<double> next(nc);
  double src = 0.0, exo = 0.0, loss = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t c = g.index(i, j, k);
        const Material& m = model.material_of(c);
        const int idx[3] = {i, j, k};
        const double Tc = s.T[c];
        double flux = 0.0;  // W into the cell
        double gsum = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int side = 0; side < 2; ++side) {
            const int nb = idx[a] + (side ? 1 : -1);
            if (nb < 0 || nb >= n[a]) {
              const double G = film(model.h[2 * a + side], m.conductivity_thermal, geo.d[a], geo.area[a]);
              gsum += G;
              const double out = G * (Tc - model.ambient_T);
              flux -= out;
              loss += out * dt;
            } else {
              int p[3] = {i, j, k};
              p[a] = nb;
              const std::size_t o = g.index(p[0], p[1], p[2]);
              const double G = link(m.conductivity_thermal, model.material_of(o).conductivity_thermal,
                                    geo.d[a], geo.area[a]);
              gsum += G;
              flux += G * (s.T[o] - Tc);
            }
          }
        const double cap = m.density * m.heat_capacity * geo.vol;
        if (dt * gsum > cap * (1 + 1e-12))
          throw UnstableTimestep(fmt::format(
              "thermal dt {:.6g} s exceeds the explicit bound {:.6g} s", dt, max_stable_dt(model)));
        const double source = q[c] * geo.vol;
        const double released = s.pending[c] * geo.vol;
        next[c] = Tc + (dt * (flux + source) + released) / cap;
        src += source * dt;
        exo += released;
      }
  s.T.swap(next);
  std::fill(s.pending.begin(), s.pending.end(), 0.0);
  s.ledger.source += src;
  s.ledger.exotherm += exo;
  s.ledger.boundary += loss;
  s.time += dt;
  s.sigma_ind = stress_indicator(model, s);
}

double stress_indicator(const Material& mat, double T, double alpha, double cte_ref) {
  double strain = (mat.cte - cte_ref) * (T - constants::t_ref);
  if (mat.cure) strain += mat.cure->shrink * std::max(0.0, alpha - mat.cure->alpha_gel);
  return mat.modulus / (1.0 - mat.poisson) * strain;
}

std::vector<double> stress_indicator(const ThermalModel& model, const ThermalState& state) {
  std::vector<double> out(state.T.size());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = stress_indicator(model.material_of(c), state.T[c], state.alpha[c], model.cte_ref);
  return out;
}

double stored_energy(const ThermalModel& model, const ThermalState& state) {
  const double vol = model.grid.cell_volume();
  double e = 0.0;
  for (std::size_t c = 0; c < state.T.size(); ++c) {
    const Material& m = model.material_of(c);
    e += m.density * m.heat_capacity * state.T[c] * vol;
  }
  return e;
}

double layer_average(const ThermalModel& model, const ThermalState& state, int k) {
  const auto& g = model.grid;
  if (k < 0 || k >= g.nz) throw InvalidArgument("layer index out of range");
  // Equal face areas on a structured grid: the area weights cancel.
  double sum = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) sum += state.T[g.index(i, j, k)];
  return sum / (static_cast<double>(g.nx) * g.ny);
}

double sensor_average(const ThermalModel& model, const ThermalState& state) {
  return layer_average(model, state, model.grid.nz - 1);
}

double sensor_average(const ThermalModel& model, const ThermalState& state, double noise_std,
                      std::mt19937_64& rng) {
  const double mean = sensor_average(model, state);
  if (!(noise_std > 0)) return mean;
  std::normal_distribution<double> noise(0.0, noise_std);
  return mean + noise(rng);
}

}  // namespace oven
