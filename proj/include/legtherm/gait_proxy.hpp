#pragma once

#include <array>
#include <cstdint>

#include "legtherm/common.hpp"
#include "legtherm/sim_config.hpp"

namespace legtherm {

struct Command {
  double vx = 0.0;   // m/s
  double vy = 0.0;   // m/s
  double yaw = 0.0;  // rad/s

  double planar_speed() const;
  bool operator==(const Command&) const = default;
};

struct AgentSetup {
  double payload_mass = 0.0;
  std::array<double, 3> com_shift{};
  std::array<double, 3> external_force{};
  double ambient_temp = 20.0;
  std::array<double, kNumMotors> initial_motor_temps{};
  double initial_computer_temp = 20.0;
  std::uint64_t seed = 0;

  bool operator==(const AgentSetup&) const = default;
};

struct FootState {
  std::array<double, kNumLegs> height{};    // m above ground
  std::array<double, kNumLegs> xy_speed{};  // m/s
};

struct GaitSample {
  bool moving = false;
  JointArray action{};          // nominal action, action units
  JointArray joint_velocity{};  // reference joint speed, rad/s
  JointArray load_torque{};     // signed, N*m
  FootState feet;
  double body_height = 0.0;
};

/// Phase of leg `leg` for a trot (diagonal pairs FL/RR and FR/RL in antiphase).
double leg_phase(double phase, std::size_t leg);

bool is_moving(const Command& cmd, const GaitProxyParams& p);

/// Signed load torque per joint. `planar_speed` and `yaw_rate` set the dynamic part,
/// which is scaled by `amplitude_ratio`; the whole load is scaled by `terrain_factor`.
JointArray gait_load_torques(bool moving, double planar_speed, double yaw_rate,
                             const AgentSetup& setup, const GaitProxyParams& p, double phase,
                             double amplitude_ratio = 1.0, double terrain_factor = 1.0);

/// Nominal trot for `cmd` at stride phase `phase` in [0, 1).
GaitSample gait_proxy_step(const Command& cmd, const AgentSetup& setup, const GaitProxyParams& p,
                           double phase, double action_scale, double terrain_factor = 1.0);

}  // namespace legtherm
