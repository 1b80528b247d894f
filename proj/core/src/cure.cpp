#include <algorithm>
#include <cmath>

#include "oven/error.hpp"
#include "oven/thermal.hpp"

namespace oven {

namespace {

constexpr double kMaxIncrement = 0.01;
// Cap on h |d rate / d alpha|; the increment rule alone lets h grow without
// bound as alpha approaches 1.
constexpr double kMaxStiffness = 0.1;

double rk4(const CureKinetics& kin, double T, double a, double h) {
  const double k1 = kin.rate(T, a);
  const double k2 = kin.rate(T, a + 0.5 * h * k1);
  const double k3 = kin.rate(T, a + 0.5 * h * k2);
  const double k4 = kin.rate(T, a + h * k3);
  return a + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

// Integrates alpha over dt at fixed T.
double advance_cure(const CureKinetics& kin, double T, double alpha, double dt) {
  double t = 0.0;
  double h = dt;
  while (dt - t > 1e-15 * dt && alpha < 1.0) {
    h = std::min(h, dt - t);
    const double r = kin.rate(T, alpha);
    if (r <= 0) break;
    h = std::min(h, kMaxIncrement / r);
    const double da = alpha < 0.5 ? 1e-6 : -1e-6;
    const double slope = std::abs(kin.rate(T, alpha + da) - r) / 1e-6;
    if (slope > 0) h = std::min(h, kMaxStiffness / slope);
    double next = rk4(kin, T, alpha, h);
    while (next - alpha > kMaxIncrement) {
      h *= 0.5;
      next = rk4(kin, T, alpha, h);
    }
    alpha = std::clamp(next, alpha, 1.0);
    t += h;
    // Let the step grow back once the rate drops.
    h = dt;
  }
  return alpha;
}

}  // namespace

void step_cure(const ThermalModel& model, ThermalState& state, double dt) {
  if (!(dt > 0)) throw InvalidArgument("cure dt must be positive");
  for (std::size_t c = 0; c < state.alpha.size(); ++c) {
    const Material& m = model.material_of(c);
    if (!m.cure) continue;
    const double a0 = state.alpha[c];
    const double a1 = advance_cure(*m.cure, state.T[c], a0, dt);
    state.alpha[c] = a1;
    state.pending[c] += m.density * m.cure->dh * (a1 - a0);
  }
}

}  // namespace oven
