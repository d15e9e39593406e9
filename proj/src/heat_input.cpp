#include "legtherm/heat_input.hpp"

#include <cmath>

namespace legtherm {

void validate(const MotorElectricalParams& p) {
  std::vector<Issue> issues;
  auto positive = [&](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      issues.push_back({ErrorKind::non_positive_parameter, std::string(name) + " must be > 0"});
    }
  };
  auto non_negative = [&](double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      issues.push_back({ErrorKind::non_positive_parameter, std::string(name) + " must be >= 0"});
    }
  };
  positive(p.torque_constant, "torque_constant");
  positive(p.winding_resistance, "winding_resistance");
  non_negative(p.driver_power, "driver_power");
  non_negative(p.friction_coeff, "friction_coeff");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double rms_torque(std::span<const double> substep_torques) {
  if (substep_torques.empty()) throw Error(ErrorKind::empty_window, "torque window is empty");
  double sum_sq = 0.0;
  for (double t : substep_torques) sum_sq += t * t;
  return std::sqrt(sum_sq / static_cast<double>(substep_torques.size()));
}

double mean_abs(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_window, "window is empty");
  double sum = 0.0;
  for (double v : values) sum += std::abs(v);
  return sum / static_cast<double>(values.size());
}

double joule_heat(double tau_rms, const MotorElectricalParams& params) {
  const double current = tau_rms / params.torque_constant;
  return current * current * params.winding_resistance;
}

double friction_heat(double speed, const MotorElectricalParams& params) {
  return params.friction_coeff * speed * speed;
}

MotorWindow summarize_window(std::span<const MotorSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::empty_window, "motor sample window is empty");
  double sum_sq = 0.0;
  double sum_speed = 0.0;
  for (const auto& s : samples) {
    sum_sq += s.torque * s.torque;
    sum_speed += std::abs(s.speed);
  }
  const auto n = static_cast<double>(samples.size());
  return {std::sqrt(sum_sq / n), sum_speed / n};
}

HeatVector assemble_heat_vector(std::span<const MotorWindow> windows,
                                std::span<const MotorElectricalParams> params,
                                double computer_power) {
  if (windows.size() != kNumMotors) throw_dimension_mismatch("motor windows", kNumMotors, windows.size());
  if (params.size() != kNumMotors) throw_dimension_mismatch("motor parameters", kNumMotors, params.size());
  HeatVector heat;
  for (std::size_t m = 0; m < kNumMotors; ++m) {
    heat.q[m] = joule_heat(windows[m].rms_torque, params[m]) + params[m].driver_power +
                friction_heat(windows[m].mean_abs_speed, params[m]);
  }
  heat.q[kComputerNode] = computer_power;
  heat.q[kAmbientNode] = 0.0;
  return heat;
}

}  // namespace legtherm
