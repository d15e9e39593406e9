#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "legtherm/control_compose.hpp"
#include "legtherm/heat_input.hpp"
#include "legtherm/reward_engine.hpp"
#include "legtherm/thermal_core.hpp"

namespace legtherm {

/// Per joint-type triple, indexed by JointType (HAA, HFE, KFE).
using PerJointType = std::array<double, kJointsPerLeg>;

struct ElectricalConfig {
  MotorElectricalParams defaults;
  std::map<int, MotorElectricalParams> per_motor;  // overrides keyed by motor id
  double computer_power = 10.0;                    // W

  std::array<MotorElectricalParams, kNumMotors> resolve() const;
  bool operator==(const ElectricalConfig&) const = default;
};

struct ThermalOptions {
  double bucket_width = 0.1;  // m/s
  Discretization discretization = Discretization::exact;
  /// When false every heat input is zeroed; used for passivity sanity runs.
  bool heat_enabled = true;

  bool operator==(const ThermalOptions&) const = default;
};

struct ControlConfig {
  PdGains gains;
  JointLimits limits = default_joint_limits();
  JointArray default_pose = default_joint_pose();
  double action_scale = 0.25;  // rad per action unit
  double action_clip = 3.0;    // action units
  double policy_dt = 0.02;     // s
  int substeps = 4;

  bool operator==(const ControlConfig&) const = default;
};

/// Synthetic trot standing in for the learned nominal policy. Load torque per joint is
///   terrain * [(base + payload_gain * m + force_gain * |F_xy|)
///              + amplitude_ratio * (speed_gain * |v_xy| + yaw_gain * |yaw|)]
/// shaped over the stride by (1 + stance_modulation * cos(2 pi leg_phase)).
struct GaitProxyParams {
  double stride_frequency = 2.0;  // Hz
  PerJointType base_load{0.6, 1.0, 1.4};
  PerJointType speed_gain{0.5, 1.6, 3.3};
  PerJointType yaw_gain{0.3, 0.3, 0.5};
  PerJointType payload_gain{0.05, 0.12, 0.25};
  PerJointType force_gain{0.005, 0.01, 0.02};
  PerJointType swing_amplitude{0.03, 0.15, 0.25};  // rad
  PerJointType crouch_per_speed{0.0, 0.05, 0.08};  // rad per m/s
  double stance_modulation = 0.5;
  double foot_clearance = 0.08;       // m, peak swing height
  double standing_height = 0.38;      // m
  double height_drop_per_speed = 0.02;
  double moving_threshold = 0.05;     // below this command magnitude the robot stands

  bool operator==(const GaitProxyParams&) const = default;
};

/// Scripted stand-in for the residual policy.
struct GovernorParams {
  double max_command_scale_reduction = 0.001;
  double max_amplitude_reduction = 1.0;
  double yaw_relief_gain = 0.1;     // rad/s per unit weight
  double steer_action_gain = 0.2;   // HAA action units per rad/s of yaw relief

  bool operator==(const GovernorParams&) const = default;
};

struct PlantParams {
  double velocity_lag = 0.3;    // s, first-order lag from command to achieved velocity
  double joint_inertia = 0.05;  // kg*m^2, reflected at the joint

  bool operator==(const PlantParams&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct RandomizationRanges {
  Range payload{0.0, 5.0};               // kg
  Range com_shift{-0.05, 0.05};          // m, per axis
  Range external_force{-30.0, 30.0};     // N, per axis
  Range ambient{0.0, 35.0};              // degC
  Range initial_temp_offset{-25.0, 10.0};  // degC relative to T_max

  bool operator==(const RandomizationRanges&) const = default;
};

struct CommandRanges {
  Range vx{-2.0, 2.0};
  Range vy{-1.0, 1.0};
  Range yaw{-2.0, 2.0};

  bool operator==(const CommandRanges&) const = default;
};

struct LongHorizonConfig {
  double duration = 800.0;      // s
  double segment = 30.0;        // s between command updates
  double initial_temp = 20.0;   // degC, all motors and the computer
  Range payload{2.5, 3.5};      // kg

  bool operator==(const LongHorizonConfig&) const = default;
};

struct TerrainProfile {
  double rise = 0.0;        // m (stairs)
  double run = 0.0;         // m (stairs)
  double slope_deg = 0.0;   // (slopes)
  double torque_factor = 1.0;

  bool operator==(const TerrainProfile&) const = default;
};

struct TerrainConfig {
  TerrainProfile stairs{0.1, 0.3, 0.0, 1.6};
  TerrainProfile slope{0.0, 0.0, 20.0, 1.4};
  double length = 6.0;          // m
  double command_speed = 1.0;   // m/s
  double payload = 3.0;         // kg
  double max_time = 40.0;       // s

  bool operator==(const TerrainConfig&) const = default;
};

struct OutcomeThresholds {
  double t_max = 60.0;
  double drift_distance = 1.0;       // m lateral deviation
  double stuck_window = 30.0;        // s
  double stuck_displacement = 0.1;   // m
  double stuck_command_speed = 0.2;  // m/s

  bool operator==(const OutcomeThresholds&) const = default;
};

struct EnvConfig {
  double termination_temp = 70.0;  // degC; any motor above ends the episode
  double episode_duration = 20.0;  // s

  bool operator==(const EnvConfig&) const = default;
};

struct SimConfig {
  NetworkConfig network = default_network_config();
  ElectricalConfig electrical;
  ThermalOptions thermal;
  RewardWeights rewards;
  ThermalWeightMode reward_mode = ThermalWeightMode::smooth;
  ControlConfig control;
  GaitProxyParams gait;
  GovernorParams governor;
  PlantParams plant;
  RandomizationRanges randomization;
  CommandRanges commands;
  LongHorizonConfig long_horizon;
  TerrainConfig terrain;
  OutcomeThresholds outcome;
  EnvConfig env;

  bool operator==(const SimConfig&) const = default;
};

SimConfig default_sim_config();

/// Checks every section; throws ValidationError listing all problems.
void validate(const SimConfig& cfg);

}  // namespace legtherm
