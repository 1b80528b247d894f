#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oven {

// Kamal-Sourour autocatalytic cure law:
//   d(alpha)/dt = (a1 exp(-e1/RT) + a2 exp(-e2/RT) alpha^m) (1 - alpha)^n
struct CureKinetics {
  double a1 = 0.0;  // 1/s
  double a2 = 0.0;  // 1/s
  double e1 = 6.0e4;  // J/mol
  double e2 = 6.0e4;  // J/mol
  double m = 0.0;
  double n = 1.0;
  double dh = 0.0;  // J/kg, total exotherm
  double alpha_gel = 0.5;
  double shrink = 0.0;  // strain per unit cure beyond gel

  void validate() const;

  // Conversion rate at temperature t and cure alpha (clamped into [0,1]).
  // Zero for t <= 0.
  double rate(double t, double alpha) const;
};

struct Material {
  std::string name;
  double eps_r = 1.0;
  double tan_delta = 0.0;
  double density = 1.0;               // kg/m^3
  double heat_capacity = 1.0;         // J/(kg K)
  double conductivity_thermal = 1.0;  // W/(m K)
  double cte = 0.0;                   // 1/K
  double modulus = 0.0;               // Pa
  double poisson = 0.0;
  std::optional<CureKinetics> cure;
  double eps_slope_T = 0.0;      // d(eps_r)/dT, 1/K
  double tan_slope_T = 0.0;      // d(tan_delta)/dT, 1/K
  double tan_slope_alpha = 0.0;  // change in tan_delta per unit cure

  void validate() const;
};

struct EmProperties {
  double eps_r;
  double tan_delta;
};

// Linearised permittivity and loss tangent at (t, alpha), clamped to
// eps_r >= 1 and tan_delta >= 0.
EmProperties effective_em(const Material& mat, double t, double alpha);

// Equivalent ohmic conductivity 2 pi f eps0 eps_r tan_delta (S/m).
double effective_conductivity(const Material& mat, double f, double t,
                              double alpha);
double equivalent_conductivity(EmProperties props, double f);

// Name-keyed material table. Starts out with the bundled entries; config
// files add to or override them.
class MaterialLibrary {
 public:
  MaterialLibrary() = default;

  static MaterialLibrary bundled();

  void add(Material mat);  // replaces an existing entry with the same name
  bool contains(const std::string& name) const;
  const Material& at(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Material> items_;
};

namespace bundled {
Material air();
Material filler();
Material solder_sample();
Material idealized_polymer();
}  // namespace bundled

}  // namespace oven
