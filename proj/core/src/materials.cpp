#include "oven/materials.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

namespace {

void require(bool ok, const std::string& who, const char* what) {
  if (!ok) throw InvalidArgument(fmt::format("{}: {}", who, what));
}

}  // namespace

void CureKinetics::validate() const {
  require(a1 >= 0 && a2 >= 0, "cure", "pre-exponential rates must be >= 0");
  require(e1 > 0 && e2 > 0, "cure", "activation energies must be > 0");
  require(m >= 0, "cure", "reaction order m must be >= 0");
  require(n > 0, "cure", "reaction order n must be > 0");
  require(alpha_gel > 0 && alpha_gel < 1, "cure", "alpha_gel must lie in (0,1)");
  require(dh >= 0, "cure", "exotherm dh must be >= 0");
}

double CureKinetics::rate(double t, double alpha) const {
  if (!(t > 0)) return 0.0;
  const double x = std::clamp(alpha, 0.0, 1.0);
  const double rt = constants::gas_constant * t;
  const double k1 = a1 * std::exp(-e1 / rt);
  const double k2 = a2 * std::exp(-e2 / rt);
  return (k1 + k2 * std::pow(x, m)) * std::pow(1.0 - x, n);
}

void Material::validate() const {
  require(eps_r >= 1.0, name, "eps_r must be >= 1");
  require(tan_delta >= 0.0, name, "tan_delta must be >= 0");
  require(density > 0, name, "density must be > 0");
  require(heat_capacity > 0, name, "heat_capacity must be > 0");
  require(conductivity_thermal > 0, name, "conductivity_thermal must be > 0");
  if (cure) cure->validate();
}

EmProperties effective_em(const Material& mat, double t, double alpha) {
  const double dt = t - constants::t_ref;
  const double eps = mat.eps_r + mat.eps_slope_T * dt;
  const double tan = mat.tan_delta + mat.tan_slope_T * dt +
                     mat.tan_slope_alpha * alpha;
  return {std::max(eps, 1.0), std::max(tan, 0.0)};
}

double equivalent_conductivity(EmProperties props, double f) {
  return 2.0 * constants::pi * f * constants::eps0 * props.eps_r *
         props.tan_delta;
}

double effective_conductivity(const Material& mat, double f, double t,
                              double alpha) {
  return equivalent_conductivity(effective_em(mat, t, alpha), f);
}

void MaterialLibrary::add(Material mat) {
  mat.validate();
  const std::string key = mat.name;
  items_.insert_or_assign(key, std::move(mat));
}

bool MaterialLibrary::contains(const std::string& name) const {
  return items_.count(name) != 0;
}

const Material& MaterialLibrary::at(const std::string& name) const {
  auto it = items_.find(name);
  if (it == items_.end())
    throw InvalidArgument(fmt::format("unknown material '{}'", name));
  return it->second;
}

std::vector<std::string> MaterialLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& [k, v] : items_) out.push_back(k);
  return out;
}

MaterialLibrary MaterialLibrary::bundled() {
  MaterialLibrary lib;
  lib.add(bundled::air());
  lib.add(bundled::filler());
  lib.add(bundled::solder_sample());
  lib.add(bundled::idealized_polymer());
  return lib;
}

namespace bundled {

Material air() {
  Material m;
  m.name = "air";
  m.density = 1.204;
  m.heat_capacity = 1005.0;
  m.conductivity_thermal = 0.0257;
  return m;
}

// Low-loss ceramic filling. eps_r and tan_delta are the 10 GHz values of the
// prototype; thermal and elastic constants are typical alumina-like
// placeholders.
Material filler() {
  Material m;
  m.name = "filler";
  m.eps_r = 6.0;
  m.tan_delta = 0.0005;
  m.density = 2500.0;
  m.heat_capacity = 900.0;
  m.conductivity_thermal = 2.0;
  m.cte = 7.0e-6;
  m.modulus = 1.5e11;
  m.poisson = 0.22;
  return m;
}

// Lead-free solder paste between glass coverslips. Only eps_r and tan_delta
// were measured; the rest are placeholders.
Material solder_sample() {
  Material m;
  m.name = "solder-sample";
  m.eps_r = 4.6;
  m.tan_delta = 0.6;
  m.density = 3000.0;
  m.heat_capacity = 700.0;
  m.conductivity_thermal = 0.8;
  m.cte = 2.5e-5;
  m.modulus = 2.0e10;
  m.poisson = 0.3;
  return m;
}

// Generic thermoset load for cure runs. All values are placeholders meant to
// be overridden from the run configuration.
Material idealized_polymer() {
  Material m;
  m.name = "idealized-polymer";
  m.eps_r = 3.5;
  m.tan_delta = 0.05;
  m.density = 1200.0;
  m.heat_capacity = 1300.0;
  m.conductivity_thermal = 0.2;
  m.cte = 6.0e-5;
  m.modulus = 3.0e9;
  m.poisson = 0.35;
  CureKinetics k;
  k.a1 = 5.0e5;
  k.e1 = 6.0e4;
  k.a2 = 0.0;
  k.e2 = 6.0e4;
  k.m = 0.0;
  k.n = 1.0;
  k.dh = 3.0e5;
  k.alpha_gel = 0.6;
  k.shrink = 0.02;
  m.cure = k;
  return m;
}

}  // namespace bundled

}  // namespace oven
