#include "legtherm/governor.hpp"

#include <algorithm>

namespace legtherm {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double governor_weight(std::span<const double> motor_temps, const RewardWeights& w) {
  if (motor_temps.size() != kNumMotors) throw_dimension_mismatch("motor_temps", kNumMotors, motor_temps.size());
  double m = 0.0;
  for (double t : motor_temps) m = std::max(m, thermal_weight(t, w, ThermalWeightMode::smooth));
  return std::clamp(m, 0.0, 1.0);
}

double amplitude_ratio(std::span<const double> a_nom, std::span<const double> a_res) {
  if (a_res.size() != a_nom.size()) throw_dimension_mismatch("a_res", a_nom.size(), a_res.size());
  const double nn = dot(a_nom, a_nom);
  if (nn == 0.0) return 1.0;
  return 1.0 + dot(a_res, a_nom) / nn;
}

GovernorOutput governor_modulate(const Command& cmd, std::span<const double> a_nom,
                                 std::span<const double> motor_temps, const GovernorParams& p,
                                 const RewardWeights& w, double yaw_direction) {
  if (a_nom.size() != kNumMotors) throw_dimension_mismatch("a_nom", kNumMotors, a_nom.size());
  GovernorOutput out;
  out.weight = governor_weight(motor_temps, w);
  const double wt = out.weight;

  const double scale = 1.0 - p.max_command_scale_reduction * wt;
  out.command = {cmd.vx * scale, cmd.vy * scale, cmd.yaw};
  const double nn = dot(a_nom, a_nom);
  // A standing robot has no gait to steer or shrink.
  if (nn == 0.0) return out;
  out.command.yaw += yaw_direction * p.yaw_relief_gain * wt;

  JointArray steer{};
  const double bias = yaw_direction * p.steer_action_gain * p.yaw_relief_gain;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    steer[joint_index(leg, JointType::haa)] = leg < 2 ? bias : -bias;
  }
  const double c = dot(steer, a_nom) / nn;
  for (std::size_t j = 0; j < kNumMotors; ++j) steer[j] -= c * a_nom[j];
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    out.residual[j] = wt * (steer[j] - p.max_amplitude_reduction * a_nom[j]);
  }
  return out;
}

}  // namespace legtherm
