#include "legtherm/gait_proxy.hpp"

#include <cmath>
#include <numbers>

namespace legtherm {
namespace {

constexpr std::array<double, kNumLegs> kLegOffset{0.0, 0.5, 0.5, 0.0};

double joint_sign(std::size_t joint) {
  switch (joint_type(joint)) {
    case JointType::haa:
      return is_left_leg(joint_leg(joint)) ? 1.0 : -1.0;
    case JointType::hfe:
      return 1.0;
    case JointType::kfe:
      return -1.0;
  }
  return 1.0;
}

}  // namespace

double Command::planar_speed() const { return std::hypot(vx, vy); }

double leg_phase(double phase, std::size_t leg) {
  const double p = phase + kLegOffset.at(leg);
  return p - std::floor(p);
}

bool is_moving(const Command& cmd, const GaitProxyParams& p) {
  return cmd.planar_speed() > p.moving_threshold || std::abs(cmd.yaw) > p.moving_threshold;
}

JointArray gait_load_torques(bool moving, double planar_speed, double yaw_rate,
                             const AgentSetup& setup, const GaitProxyParams& p, double phase,
                             double amplitude_ratio, double terrain_factor) {
  const double force = std::hypot(setup.external_force[0], setup.external_force[1]);
  JointArray tau{};
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    const auto t = static_cast<std::size_t>(joint_type(j));
    const double support = p.base_load[t] + p.payload_gain[t] * setup.payload_mass + p.force_gain[t] * force;
    double mag = support;
    if (moving) {
      const double dynamic =
          amplitude_ratio * (p.speed_gain[t] * planar_speed + p.yaw_gain[t] * std::abs(yaw_rate));
      const double shape =
          1.0 + p.stance_modulation * std::cos(2.0 * std::numbers::pi * leg_phase(phase, joint_leg(j)));
      mag = (support + dynamic) * shape;
    }
    tau[j] = joint_sign(j) * terrain_factor * mag;
  }
  return tau;
}

GaitSample gait_proxy_step(const Command& cmd, const AgentSetup& setup, const GaitProxyParams& p,
                           double phase, double action_scale, double terrain_factor) {
  GaitSample out;
  out.moving = is_moving(cmd, p);
  const double speed = cmd.planar_speed();
  out.load_torque = gait_load_torques(out.moving, speed, cmd.yaw, setup, p, phase, 1.0, terrain_factor);
  out.body_height = p.standing_height;
  if (!out.moving) return out;

  const double omega = 2.0 * std::numbers::pi * p.stride_frequency;
  out.body_height = p.standing_height - p.height_drop_per_speed * speed;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const double angle = 2.0 * std::numbers::pi * leg_phase(phase, leg);
    for (std::size_t k = 0; k < kJointsPerLeg; ++k) {
      const std::size_t j = joint_index(leg, static_cast<JointType>(k));
      const double offset = p.crouch_per_speed[k] * speed + p.swing_amplitude[k] * std::sin(angle);
      out.action[j] = joint_sign(j) * offset / action_scale;
      out.joint_velocity[j] = joint_sign(j) * p.swing_amplitude[k] * omega * std::cos(angle);
    }
    const double lift = std::sin(angle);
    out.feet.height[leg] = lift > 0.0 ? p.foot_clearance * lift : 0.0;
    out.feet.xy_speed[leg] = lift > 0.0 ? 2.0 * speed : 0.0;
  }
  return out;
}

}  // namespace legtherm
