#include "legtherm/agent_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "legtherm/governor.hpp"

namespace legtherm {
namespace {

ModelCache make_cache(const SimConfig& cfg) {
  validate(cfg);
  return ModelCache(build_network(cfg.network), cfg.control.policy_dt, cfg.thermal.bucket_width,
                    cfg.thermal.discretization);
}

double max_abs(const Range& r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

}  // namespace

SimContext::SimContext(SimConfig cfg)
    : cfg_(std::move(cfg)), cache_(make_cache(cfg_)), motor_params_(cfg_.electrical.resolve()) {
  cache_.prepopulate(std::hypot(max_abs(cfg_.commands.vx), max_abs(cfg_.commands.vy)) +
                     cfg_.thermal.bucket_width);
}

std::string_view to_string(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::nominal_only:
      return "nominal_only";
    case PolicyMode::governed:
      return "governed";
    case PolicyMode::external_residual:
      return "external_residual";
    case PolicyMode::external_nominal:
      return "external_nominal";
  }
  return "?";
}

PolicyMode policy_mode_from_string(std::string_view name) {
  for (auto m : {PolicyMode::nominal_only, PolicyMode::governed, PolicyMode::external_residual,
                 PolicyMode::external_nominal}) {
    if (to_string(m) == name) return m;
  }
  if (name == "nominal") return PolicyMode::nominal_only;
  throw Error(ErrorKind::invalid_argument, "unknown mode '" + std::string(name) + "'");
}

bool is_external(PolicyMode mode) {
  return mode == PolicyMode::external_residual || mode == PolicyMode::external_nominal;
}

AgentSim::AgentSim(const SimContext& ctx, AgentSetup setup, CommandProfile profile, PolicyMode mode,
                   double terrain_factor)
    : ctx_(ctx),
      setup_(std::move(setup)),
      profile_(std::move(profile)),
      mode_(mode),
      terrain_factor_(terrain_factor),
      dt_(ctx.config().control.policy_dt),
      yaw_dir_(yaw_direction(setup_.seed)),
      lag_alpha_(1.0 - std::exp(-dt_ / ctx.config().plant.velocity_lag)) {
  if (!(terrain_factor > 0.0)) throw Error(ErrorKind::invalid_argument, "terrain factor must be positive");
  const SimConfig& cfg = ctx_.config();
  const Command& cmd0 = profile_.command_at(0.0);
  const GaitSample g = gait_proxy_step(cmd0, setup_, cfg.gait, 0.0, cfg.control.action_scale, terrain_factor_);
  // Start on the trajectory the first step will command, so there is no start-up transient.
  JointArray res0{};
  if (mode_ == PolicyMode::governed) {
    res0 = governor_modulate(cmd0, g.action, setup_.initial_motor_temps, cfg.governor, cfg.rewards, yaw_dir_).residual;
  }
  const double rho0 = std::max(amplitude_ratio(g.action, res0), 0.0);
  const JointArray load0 =
      gait_load_torques(g.moving, 0.0, cmd0.yaw, setup_, cfg.gait, 0.0, rho0, terrain_factor_);
  const JointArray off = scale_action(g.action, cfg.control.action_scale, cfg.control.action_clip);
  const JointArray off_res = scale_action(res0, cfg.control.action_scale, cfg.control.action_clip);
  const ComposedTarget target = compose_actions(cfg.control.default_pose, off, off_res, cfg.control.limits);
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    joints_.position[j] = target.target[j] + load0[j] / cfg.control.gains.kp;
    joints_.velocity[j] = rho0 * g.joint_velocity[j];
  }

  info_.command = cmd0;
  info_.modulated_command = cmd0;
  info_.a_nom = g.action;
  info_.temps = TemperatureState::from_motor_temps(setup_.initial_motor_temps, setup_.initial_computer_temp,
                                                   setup_.ambient_temp);
  info_.governor_weight = governor_weight(setup_.initial_motor_temps, cfg.rewards);
}

std::array<double, kNumMotors> AgentSim::motor_temps() const {
  std::array<double, kNumMotors> t{};
  for (std::size_t i = 0; i < kNumMotors; ++i) t[i] = info_.temps.temps[static_cast<Eigen::Index>(i)];
  return t;
}

const StepInfo& AgentSim::step(std::span<const double> action) {
  const SimConfig& cfg = ctx_.config();
  if (is_external(mode_)) {
    if (action.size() != kNumMotors) throw_dimension_mismatch("action", kNumMotors, action.size());
  } else if (!action.empty()) {
    throw Error(ErrorKind::invalid_argument, "scripted modes take no action input");
  }

  const std::size_t k = info_.step;
  const double t = static_cast<double>(k) * dt_;
  const Command user = profile_.command_at(t);
  const GaitSample gait =
      gait_proxy_step(user, setup_, cfg.gait, phase_, cfg.control.action_scale, terrain_factor_);
  const std::array<double, kNumMotors> temps_before = motor_temps();

  StepInfo out;
  out.step = k + 1;
  out.time = static_cast<double>(k + 1) * dt_;
  out.command = user;
  out.modulated_command = user;
  out.governor_weight = governor_weight(temps_before, cfg.rewards);

  JointArray a_nom = gait.action;
  JointArray a_res{};
  switch (mode_) {
    case PolicyMode::nominal_only:
      break;
    case PolicyMode::governed: {
      const GovernorOutput g =
          governor_modulate(user, a_nom, temps_before, cfg.governor, cfg.rewards, yaw_dir_);
      a_res = g.residual;
      out.modulated_command = g.command;
      break;
    }
    case PolicyMode::external_residual:
      std::copy(action.begin(), action.end(), a_res.begin());
      break;
    case PolicyMode::external_nominal:
      std::copy(action.begin(), action.end(), a_nom.begin());
      break;
  }
  out.a_nom = a_nom;
  out.a_res = a_res;

  // Share of the proxy gait amplitude actually executed.
  double rho = 1.0;
  if (mode_ == PolicyMode::external_nominal) {
    JointArray diff{};
    for (std::size_t j = 0; j < kNumMotors; ++j) diff[j] = a_nom[j] - gait.action[j];
    rho = amplitude_ratio(gait.action, diff);
  } else {
    rho = amplitude_ratio(a_nom, a_res);
  }
  rho = std::max(rho, 0.0);

  const JointArray off_nom = scale_action(a_nom, cfg.control.action_scale, cfg.control.action_clip);
  const JointArray off_res = scale_action(a_res, cfg.control.action_scale, cfg.control.action_clip);
  const ComposedTarget target = compose_actions(cfg.control.default_pose, off_nom, off_res, cfg.control.limits);
  out.clip_events = target.clip_events;

  const Command& mod = out.modulated_command;
  const std::array<double, 3> cmd_mod{mod.vx, mod.vy, mod.yaw};
  const std::array<double, 3> cmd_user{user.vx, user.vy, user.yaw};
  for (std::size_t i = 0; i < 3; ++i) {
    v_ach_[i] += lag_alpha_ * (cmd_mod[i] - v_ach_[i]);
    v_ref_[i] += lag_alpha_ * (cmd_user[i] - v_ref_[i]);
  }
  out.achieved = v_ach_;
  const double planar = std::hypot(v_ach_[0], v_ach_[1]);

  const std::size_t substeps = static_cast<std::size_t>(cfg.control.substeps);
  const double dts = dt_ / static_cast<double>(substeps);
  const double inertia = cfg.plant.joint_inertia;
  double sub_phase = phase_;
  JointArray accel{};
  ControlWindow window;
  control_cycle(
      target.target, joints_, cfg.control.gains, substeps,
      [&](std::size_t, const JointArray& tau, JointState& js) {
        const JointArray load = gait_load_torques(gait.moving, planar, user.yaw, setup_, cfg.gait, sub_phase,
                                                  rho, terrain_factor_);
        for (std::size_t j = 0; j < kNumMotors; ++j) {
          accel[j] = (tau[j] - load[j]) / inertia;
          js.velocity[j] += accel[j] * dts;
          js.position[j] += js.velocity[j] * dts;
        }
        if (gait.moving) sub_phase += cfg.gait.stride_frequency * dts;
      },
      window);
  phase_ = sub_phase - std::floor(sub_phase);
  out.saturation_events = window.saturation_events;

  if (cfg.thermal.heat_enabled) {
    std::array<MotorWindow, kNumMotors> windows{};
    for (std::size_t j = 0; j < kNumMotors; ++j) {
      double sq = 0.0;
      double sp = 0.0;
      for (std::size_t s = 0; s < substeps; ++s) {
        sq += window.torques[s][j] * window.torques[s][j];
        sp += std::abs(window.speeds[s][j]);
      }
      windows[j].rms_torque = std::sqrt(sq / static_cast<double>(substeps));
      windows[j].mean_abs_speed = sp / static_cast<double>(substeps);
    }
    out.heat = assemble_heat_vector(windows, ctx_.motor_params(), cfg.electrical.computer_power);
  }
  out.temps = legtherm::step(ctx_.cache().lookup(planar), info_.temps, out.heat);

  RewardSnapshot snap;
  snap.v_cmd_xy = {user.vx, user.vy};
  snap.v_xy = {v_ach_[0], v_ach_[1]};
  snap.yaw_rate_cmd = user.yaw;
  snap.yaw_rate = v_ach_[2];
  snap.joint_accels = accel;
  snap.body_height = gait.body_height;
  snap.foot_heights = gait.feet.height;
  snap.foot_xy_speeds = gait.feet.xy_speed;
  snap.action = a_nom;
  snap.action_prev = prev_action_;
  snap.action_prev2 = prev_action2_;
  if (mode_ == PolicyMode::external_nominal) {
    out.reward = nominal_rewards(snap, cfg.rewards);
  } else {
    ThermalRewardInput th;
    for (std::size_t i = 0; i < kNumMotors; ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      th.temps[i] = out.temps.temps[e];
      th.temp_rates[i] = (out.temps.temps[e] - info_.temps.temps[e]) / dt_;
    }
    out.reward = residual_total(snap, th, a_res, prev_res_, prev_res2_, cfg.rewards, cfg.reward_mode);
  }
  prev_action2_ = prev_action_;
  prev_action_ = a_nom;
  prev_res2_ = prev_res_;
  prev_res_ = a_res;

  out.tracking_error = std::hypot(user.vx - v_ach_[0], user.vy - v_ach_[1]);

  auto advance_pose = [this](std::array<double, 3>& pose, const std::array<double, 3>& v) {
    pose[2] += v[2] * dt_;
    const double c = std::cos(pose[2]);
    const double s = std::sin(pose[2]);
    pose[0] += (v[0] * c - v[1] * s) * dt_;
    pose[1] += (v[0] * s + v[1] * c) * dt_;
  };
  out.pose = info_.pose;
  advance_pose(out.pose, v_ach_);
  out.distance = info_.distance + planar * dt_;
  advance_pose(ref_pose_, v_ref_);
  const double h = ref_pose_[2];
  out.lateral_deviation =
      std::abs(-std::sin(h) * (out.pose[0] - ref_pose_[0]) + std::cos(h) * (out.pose[1] - ref_pose_[1]));

  info_ = out;
  return info_;
}

ObservationVector AgentSim::observation(ObsLayout layout) const {
  ObservationParts parts;
  const Command& cmd = profile_.command_at(static_cast<double>(info_.step) * dt_);
  parts.command = {cmd.vx, cmd.vy, cmd.yaw};
  parts.ang_vel = {0.0, 0.0, v_ach_[2]};
  parts.gravity = {0.0, 0.0, -1.0};
  parts.joint_pos = joints_.position;
  parts.joint_vel = joints_.velocity;
  parts.motor_temps = motor_temps();
  parts.prev_action = layout == ObsLayout::residual ? prev_res_ : prev_action_;
  return assemble(parts, layout);
}

void EpisodeRecord::reserve(std::size_t rows) {
  time.reserve(rows);
  temps.reserve(rows);
  command.reserve(rows);
  modulated_command.reserve(rows);
  achieved.reserve(rows);
  tracking_error.reserve(rows);
  governor_weight.reserve(rows);
  pose.reserve(rows);
  distance.reserve(rows);
  lateral_deviation.reserve(rows);
  clip_events.reserve(rows);
  saturation_events.reserve(rows);
  if (detailed) {
    a_nom.reserve(rows);
    a_res.reserve(rows);
    heat.reserve(rows);
    rewards.reserve(rows);
  }
}

void EpisodeRecord::append(const StepInfo& s) {
  time.push_back(s.time);
  std::array<double, kNumNodes> t{};
  for (std::size_t i = 0; i < kNumNodes; ++i) t[i] = s.temps.temps[static_cast<Eigen::Index>(i)];
  temps.push_back(t);
  command.push_back(s.command);
  modulated_command.push_back(s.modulated_command);
  achieved.push_back(s.achieved);
  tracking_error.push_back(s.tracking_error);
  governor_weight.push_back(s.governor_weight);
  pose.push_back(s.pose);
  distance.push_back(s.distance);
  lateral_deviation.push_back(s.lateral_deviation);
  clip_events.push_back(s.clip_events);
  saturation_events.push_back(s.saturation_events);
  if (detailed) {
    a_nom.push_back(s.a_nom);
    a_res.push_back(s.a_res);
    std::array<double, kNumNodes> q{};
    for (std::size_t i = 0; i < kNumNodes; ++i) q[i] = s.heat.q[static_cast<Eigen::Index>(i)];
    heat.push_back(q);
    rewards.push_back(s.reward);
  }
}

bool EpisodeRecord::consistent() const {
  const std::size_t n = time.size();
  const bool core = temps.size() == n && command.size() == n && modulated_command.size() == n &&
                    achieved.size() == n && tracking_error.size() == n && governor_weight.size() == n &&
                    pose.size() == n && distance.size() == n && lateral_deviation.size() == n && clip_events.size() == n &&
                    saturation_events.size() == n;
  if (!core) return false;
  if (detailed && (a_nom.size() != n || a_res.size() != n || heat.size() != n || rewards.size() != n)) {
    return false;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(time[i] > time[i - 1])) return false;
  }
  return true;
}

EpisodeRecord run_episode(const SimContext& ctx, const AgentSetup& setup, const CommandProfile& profile,
                          PolicyMode mode, const EpisodeOptions& options) {
  if (is_external(mode)) {
    throw Error(ErrorKind::invalid_argument, "run_episode needs a scripted mode; step AgentSim directly");
  }
  AgentSim sim(ctx, setup, profile, mode, options.terrain_factor);
  const double duration = options.duration.value_or(profile.total_duration());
  const auto steps = static_cast<std::size_t>(std::llround(duration / sim.dt()));

  EpisodeRecord rec;
  rec.dt = sim.dt();
  rec.detailed = options.detailed;
  rec.reserve(steps + 1);
  rec.append(sim.last());
  for (std::size_t k = 0; k < steps; ++k) {
    const StepInfo& s = sim.step();
    rec.append(s);
    if (options.goal_distance && s.pose[0] >= *options.goal_distance) {
      rec.traversal_time = s.time;
      break;
    }
  }
  rec.complete = true;
  return rec;
}

}  // namespace legtherm
