#include "oven/control.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oven/error.hpp"

namespace oven {

namespace {

void check_increasing(const std::vector<std::pair<double, double>>& pts, const char* what) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].first) || !std::isfinite(pts[i].second))
      throw InvalidArgument(fmt::format("{} breakpoints must be finite", what));
    if (i > 0 && !(pts[i].first > pts[i - 1].first))
      throw InvalidArgument(fmt::format("{} times must be strictly increasing", what));
  }
}

// Index of the last breakpoint with time <= t (assumes t >= front).
std::size_t segment(const std::vector<std::pair<double, double>>& pts, double t) {
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  return static_cast<std::size_t>(it - pts.begin()) - 1;
}

}  // namespace

Profile::Profile(std::vector<std::pair<double, double>> breakpoints) : pts_(std::move(breakpoints)) {
  check_increasing(pts_, "profile");
  for (const auto& p : pts_)
    if (!(p.second > 0)) throw InvalidArgument("profile temperatures must be > 0 K");
}

double Profile::eval(double t) const {
  if (pts_.empty()) throw EmptyProfile("temperature profile has no breakpoints");
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  const std::size_t i = segment(pts_, t);
  const auto& [t0, y0] = pts_[i];
  const auto& [t1, y1] = pts_[i + 1];
  return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
}

double Profile::start_time() const {
  if (pts_.empty()) throw EmptyProfile("temperature profile has no breakpoints");
  return pts_.front().first;
}

double Profile::end_time() const {
  if (pts_.empty()) throw EmptyProfile("temperature profile has no breakpoints");
  return pts_.back().first;
}

PowerSchedule::PowerSchedule(std::vector<std::pair<double, double>> breakpoints, Mode mode)
    : pts_(std::move(breakpoints)), mode_(mode) {
  check_increasing(pts_, "power schedule");
  for (const auto& p : pts_)
    if (p.second < 0) throw InvalidArgument("scheduled power must be >= 0");
}

PowerSchedule PowerSchedule::constant(double watts) { return PowerSchedule({{0.0, watts}}); }

double PowerSchedule::eval(double t) const {
  if (pts_.empty()) return 0.0;
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  const std::size_t i = segment(pts_, t);
  if (mode_ == Mode::hold) return pts_[i].second;
  const auto& [t0, y0] = pts_[i];
  const auto& [t1, y1] = pts_[i + 1];
  return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
}

void ControllerState::validate() const {
  if (!(kp >= 0 && ki >= 0 && kd >= 0)) throw InvalidArgument("controller gains must be >= 0");
  if (!(u_min == 0.0 && u_max >= u_min)) throw InvalidArgument("controller limits need 0 = u_min <= u_max");
}

double pid_step(ControllerState& c, double target, double measured, double dt) {
  if (!(dt > 0)) throw InvalidArgument("controller dt must be positive");
  const double e = target - measured;
  const double de = c.started ? (e - c.e_prev) / dt : 0.0;
  const double trial = c.integral + e * dt;
  double u = c.kp * e + c.ki * trial + c.kd * de;
  const bool inside = u >= c.u_min && u <= c.u_max;
  const bool unwinding = (u > c.u_max && e < 0) || (u < c.u_min && e > 0);
  if (inside || unwinding) {
    c.integral = trial;
  } else {
    u = c.kp * e + c.ki * c.integral + c.kd * de;
  }
  c.e_prev = e;
  c.started = true;
  return std::clamp(u, c.u_min, c.u_max);
}

StepModel identify_step(const std::vector<double>& times, const std::vector<double>& temps,
                        double T0, double step_power) {
  if (times.size() != temps.size() || times.size() < 3)
    throw InvalidArgument("step response needs at least three samples");
  if (!(step_power > 0)) throw InvalidArgument("step power must be positive");
  const double rise = temps.back() - T0;
  if (!(rise > 0)) throw InvalidArgument("step response shows no temperature rise");

  // The final sample stands in for the plateau, so the record should span
  // several time constants.
  StepModel m;
  m.gain = rise / step_power;
  const double level = T0 + 0.632 * rise;
  for (std::size_t i = 1; i < temps.size(); ++i) {
    if (temps[i] >= level) {
      const double f = (level - temps[i - 1]) / (temps[i] - temps[i - 1]);
      m.tau = times[i - 1] + f * (times[i] - times[i - 1]) - times.front();
      break;
    }
  }
  if (!(m.tau > 0)) throw InvalidArgument("could not locate the 63.2% point of the step response");
  return m;
}

ControllerState simc_tuning(const StepModel& model, double tau_c, double u_max) {
  if (!(model.gain > 0 && model.tau > 0)) throw InvalidArgument("plant model needs gain and tau > 0");
  if (!(tau_c > 0)) throw InvalidArgument("closed-loop time constant must be positive");
  ControllerState c;
  const double lag = tau_c + model.dead_time;
  c.kp = model.tau / (model.gain * lag);
  const double tau_i = std::min(model.tau, 4.0 * lag);
  c.ki = c.kp / tau_i;
  c.u_max = u_max;
  return c;
}

}  // namespace oven
