#pragma once

#include <span>

#include "legtherm/common.hpp"
#include "legtherm/thermal_core.hpp"

namespace legtherm {

struct MotorSample {
  double torque = 0.0;  // N*m
  double speed = 0.0;   // rad/s
  std::size_t index = 0;
};

struct MotorElectricalParams {
  double torque_constant = 0.6;     // N*m/A
  double winding_resistance = 0.3;  // ohm
  double driver_power = 1.0;        // W, constant driver loss
  double friction_coeff = 0.005;    // N*m*s/rad, viscous

  bool operator==(const MotorElectricalParams&) const = default;
};

/// Throws ValidationError when a parameter is out of range.
void validate(const MotorElectricalParams& params);

/// Per-motor equivalent inputs over one thermal update.
struct MotorWindow {
  double rms_torque = 0.0;
  double mean_abs_speed = 0.0;
};

/// Root-mean-square of the substep torques. Throws Error(empty_window) on an empty span.
double rms_torque(std::span<const double> substep_torques);
double mean_abs(std::span<const double> values);

/// I^2 R loss with the current inferred from torque.
double joule_heat(double tau_rms, const MotorElectricalParams& params);
/// Viscous friction loss b * omega^2.
double friction_heat(double speed, const MotorElectricalParams& params);

/// Reduces a window of substep samples for one motor.
MotorWindow summarize_window(std::span<const MotorSample> samples);

/// Builds the node heat vector: joule(rms) + driver + friction(mean |speed|) per motor,
/// `computer_power` at the computer node, 0 at ambient.
HeatVector assemble_heat_vector(std::span<const MotorWindow> windows,
                                std::span<const MotorElectricalParams> params,
                                double computer_power);

}  // namespace legtherm
