#include "legtherm/sim_config.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace legtherm {

std::array<MotorElectricalParams, kNumMotors> ElectricalConfig::resolve() const {
  std::array<MotorElectricalParams, kNumMotors> out;
  out.fill(defaults);
  for (const auto& [id, p] : per_motor) {
    if (id < 0 || id >= static_cast<int>(kNumMotors)) {
      throw Error(ErrorKind::invalid_node, "electrical override for unknown motor " + std::to_string(id));
    }
    out[static_cast<std::size_t>(id)] = p;
  }
  return out;
}

SimConfig default_sim_config() { return SimConfig{}; }

namespace {

class Checker {
 public:
  void positive(double v, const std::string& name) {
    if (!(std::isfinite(v) && v > 0.0)) add(ErrorKind::non_positive_parameter, name + " must be > 0");
  }
  void non_negative(double v, const std::string& name) {
    if (!(std::isfinite(v) && v >= 0.0)) add(ErrorKind::non_positive_parameter, name + " must be >= 0");
  }
  void fraction(double v, const std::string& name) {
    if (!(v >= 0.0 && v <= 1.0)) add(ErrorKind::config_error, name + " must lie in [0, 1]");
  }
  void range(const Range& r, const std::string& name) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
      add(ErrorKind::config_error, name + " must satisfy lo <= hi");
    }
  }
  void per_type(const PerJointType& v, const std::string& name) {
    for (std::size_t i = 0; i < v.size(); ++i) non_negative(v[i], name + "[" + std::to_string(i) + "]");
  }
  void add(ErrorKind kind, std::string message) { issues.push_back({kind, std::move(message)}); }
  template <class F>
  void nested(const std::string& prefix, F&& f) {
    try {
      f();
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) add(i.kind, prefix + ": " + i.message);
    } catch (const Error& e) {
      add(e.kind(), prefix + ": " + e.what());
    }
  }

  std::vector<Issue> issues;
};

}  // namespace

void validate(const SimConfig& cfg) {
  Checker c;
  c.nested("thermal_network", [&] { build_network(cfg.network); });
  c.nested("electrical.defaults", [&] { validate(cfg.electrical.defaults); });
  for (const auto& [id, p] : cfg.electrical.per_motor) {
    const std::string name = "electrical.per_motor." + std::to_string(id);
    if (id < 0 || id >= static_cast<int>(kNumMotors)) c.add(ErrorKind::invalid_node, name + ": no such motor");
    c.nested(name, [&] { validate(p); });
  }
  c.non_negative(cfg.electrical.computer_power, "electrical.computer_power");

  c.positive(cfg.thermal.bucket_width, "thermal.bucket_width");
  c.nested("rewards", [&] { validate(cfg.rewards); });

  const ControlConfig& ctl = cfg.control;
  c.positive(ctl.gains.kp, "control.kp");
  c.non_negative(ctl.gains.kd, "control.kd");
  c.positive(ctl.gains.torque_limit, "control.torque_limit");
  c.positive(ctl.action_scale, "control.action_scale");
  c.positive(ctl.action_clip, "control.action_clip");
  c.positive(ctl.policy_dt, "control.policy_dt");
  if (ctl.substeps < 1 || ctl.substeps > static_cast<int>(kMaxSubsteps)) {
    c.add(ErrorKind::config_error, "control.substeps must be in 1.." + std::to_string(kMaxSubsteps));
  }
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    const std::string name = "control joint " + joint_label(j);
    if (!(ctl.limits.lower[j] < ctl.limits.upper[j])) c.add(ErrorKind::config_error, name + ": lower limit >= upper");
    if (ctl.default_pose[j] < ctl.limits.lower[j] || ctl.default_pose[j] > ctl.limits.upper[j]) {
      c.add(ErrorKind::config_error, name + ": default pose outside the limits");
    }
  }

  const GaitProxyParams& g = cfg.gait;
  c.positive(g.stride_frequency, "gait.stride_frequency");
  c.per_type(g.base_load, "gait.base_load");
  c.per_type(g.speed_gain, "gait.speed_gain");
  c.per_type(g.yaw_gain, "gait.yaw_gain");
  c.per_type(g.payload_gain, "gait.payload_gain");
  c.per_type(g.force_gain, "gait.force_gain");
  c.per_type(g.swing_amplitude, "gait.swing_amplitude");
  c.per_type(g.crouch_per_speed, "gait.crouch_per_speed");
  c.fraction(g.stance_modulation, "gait.stance_modulation");
  c.non_negative(g.foot_clearance, "gait.foot_clearance");
  c.positive(g.standing_height, "gait.standing_height");
  c.non_negative(g.height_drop_per_speed, "gait.height_drop_per_speed");
  c.non_negative(g.moving_threshold, "gait.moving_threshold");

  c.fraction(cfg.governor.max_command_scale_reduction, "governor.max_command_scale_reduction");
  c.fraction(cfg.governor.max_amplitude_reduction, "governor.max_amplitude_reduction");
  c.non_negative(cfg.governor.yaw_relief_gain, "governor.yaw_relief_gain");
  c.non_negative(cfg.governor.steer_action_gain, "governor.steer_action_gain");

  c.positive(cfg.plant.velocity_lag, "plant.velocity_lag");
  c.positive(cfg.plant.joint_inertia, "plant.joint_inertia");

  const RandomizationRanges& r = cfg.randomization;
  c.range(r.payload, "randomization.payload");
  c.range(r.com_shift, "randomization.com_shift");
  c.range(r.external_force, "randomization.external_force");
  c.range(r.ambient, "randomization.ambient");
  c.range(r.initial_temp_offset, "randomization.initial_temp_offset");
  if (r.payload.lo < 0.0) c.add(ErrorKind::config_error, "randomization.payload must be >= 0");
  c.range(cfg.commands.vx, "commands.vx");
  c.range(cfg.commands.vy, "commands.vy");
  c.range(cfg.commands.yaw, "commands.yaw");

  c.positive(cfg.long_horizon.duration, "long_horizon.duration");
  c.positive(cfg.long_horizon.segment, "long_horizon.segment");
  c.range(cfg.long_horizon.payload, "long_horizon.payload");
  if (cfg.long_horizon.payload.lo < 0.0) c.add(ErrorKind::config_error, "long_horizon.payload must be >= 0");

  const TerrainConfig& t = cfg.terrain;
  c.positive(t.stairs.torque_factor, "terrain.stairs.torque_factor");
  c.positive(t.slope.torque_factor, "terrain.slope.torque_factor");
  c.non_negative(t.stairs.rise, "terrain.stairs.rise");
  c.non_negative(t.stairs.run, "terrain.stairs.run");
  c.non_negative(t.slope.slope_deg, "terrain.slope.slope_deg");
  c.positive(t.length, "terrain.length");
  c.positive(t.command_speed, "terrain.command_speed");
  c.non_negative(t.payload, "terrain.payload");
  c.positive(t.max_time, "terrain.max_time");

  c.positive(cfg.outcome.drift_distance, "outcome.drift_distance");
  c.positive(cfg.outcome.stuck_window, "outcome.stuck_window");
  c.positive(cfg.outcome.stuck_displacement, "outcome.stuck_displacement");
  c.non_negative(cfg.outcome.stuck_command_speed, "outcome.stuck_command_speed");

  c.positive(cfg.env.episode_duration, "env.episode_duration");

  if (!c.issues.empty()) throw ValidationError(std::move(c.issues));
}

}  // namespace legtherm
