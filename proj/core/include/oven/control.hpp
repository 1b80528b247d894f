#pragma once

#include <utility>
#include <vector>

namespace oven {

// Piecewise-linear target temperature, clamped outside its breakpoints.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<std::pair<double, double>> breakpoints);

  double eval(double t) const;  // throws EmptyProfile
  bool empty() const { return pts_.empty(); }
  double start_time() const;
  double end_time() const;
  const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }

 private:
  std::vector<std::pair<double, double>> pts_;
};

// Open-loop power schedule. Hold keeps each value until the next
// breakpoint, which makes replays of logged traces exact.
class PowerSchedule {
 public:
  enum class Mode { hold, linear };

  PowerSchedule() = default;
  PowerSchedule(std::vector<std::pair<double, double>> breakpoints, Mode mode = Mode::hold);
  static PowerSchedule constant(double watts);

  double eval(double t) const;
  bool empty() const { return pts_.empty(); }

 private:
  std::vector<std::pair<double, double>> pts_;
  Mode mode_ = Mode::hold;
};

struct ControllerState {
  double kp = 0.0;  // W/K
  double ki = 0.0;  // W/(K s)
  double kd = 0.0;  // W s/K
  double integral = 0.0;  // K s
  double e_prev = 0.0;    // K
  bool started = false;   // false until the first step (no derivative kick)
  double u_min = 0.0;
  double u_max = 25.0;

  void validate() const;
};

// PID with conditional-integration anti-windup; returns the clamped
// command and updates the state in place.
double pid_step(ControllerState& ctrl, double target, double measured, double dt);

// First-order-plus-dead-time fit of an open-loop step response.
struct StepModel {
  double gain = 0.0;        // K/W
  double tau = 0.0;         // s
  double dead_time = 0.0;   // s
};

// Identifies gain and time constant from samples (t, T) after a power step
// of `step_power` applied at t = times.front(), starting from rest at T0.
// The time constant is read at the 63.2 % point of the final rise.
StepModel identify_step(const std::vector<double>& times, const std::vector<double>& temps,
                        double T0, double step_power);

// SIMC PI rule: kp = tau / (K (tau_c + theta)), tau_i = min(tau, 4 (tau_c + theta)).
ControllerState simc_tuning(const StepModel& model, double tau_c, double u_max = 25.0);

}  // namespace oven
