#include "legtherm/control_compose.hpp"

#include <algorithm>
#include <cmath>

namespace legtherm {

JointLimits default_joint_limits() {
  JointLimits lim;
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    switch (joint_type(j)) {
      case JointType::haa: lim.lower[j] = -0.80; lim.upper[j] = 0.80; break;
      case JointType::hfe: lim.lower[j] = -1.05; lim.upper[j] = 4.19; break;
      case JointType::kfe: lim.lower[j] = -2.70; lim.upper[j] = -0.92; break;
    }
  }
  return lim;
}

JointArray default_joint_pose() {
  JointArray pose{};
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    switch (joint_type(j)) {
      case JointType::haa: pose[j] = is_left_leg(joint_leg(j)) ? 0.1 : -0.1; break;
      case JointType::hfe: pose[j] = 0.8; break;
      case JointType::kfe: pose[j] = -1.5; break;
    }
  }
  return pose;
}

namespace {
void require_joints(std::span<const double> v, std::string_view what) {
  if (v.size() != kNumMotors) throw_dimension_mismatch(what, kNumMotors, v.size());
}
void require_len(std::span<const double> v, std::size_t n, std::string_view what) {
  if (v.size() != n) throw_dimension_mismatch(what, n, v.size());
}
}  // namespace

JointArray scale_action(std::span<const double> action, double scale, double clip) {
  require_joints(action, "action");
  JointArray out{};
  for (std::size_t j = 0; j < kNumMotors; ++j) out[j] = std::clamp(action[j], -clip, clip) * scale;
  return out;
}

ComposedTarget compose_actions(std::span<const double> theta0, std::span<const double> a_nom,
                               std::span<const double> a_res, const JointLimits& limits) {
  require_joints(theta0, "default pose");
  require_joints(a_nom, "nominal action");
  require_joints(a_res, "residual action");
  ComposedTarget out;
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    const double raw = theta0[j] + (a_nom[j] + a_res[j]);
    const double clipped = std::clamp(raw, limits.lower[j], limits.upper[j]);
    if (clipped != raw) ++out.clip_events;
    out.target[j] = clipped;
  }
  return out;
}

JointArray pd_torque(const JointArray& target, const JointState& js, const PdGains& gains) {
  JointArray tau{};
  for (std::size_t j = 0; j < kNumMotors; ++j) {
    const double raw = gains.kp * (target[j] - js.position[j]) - gains.kd * js.velocity[j];
    tau[j] = std::clamp(raw, -gains.torque_limit, gains.torque_limit);
  }
  return tau;
}

std::vector<double> ControlWindow::torque_series(std::size_t motor) const {
  std::vector<double> out(substeps);
  for (std::size_t k = 0; k < substeps; ++k) out[k] = torques[k][motor];
  return out;
}

std::array<MotorWindow, kNumMotors> ControlWindow::summarize() const {
  if (substeps == 0) throw Error(ErrorKind::empty_window, "control window is empty");
  std::array<MotorWindow, kNumMotors> out{};
  const auto n = static_cast<double>(substeps);
  for (std::size_t m = 0; m < kNumMotors; ++m) {
    double sq = 0.0;
    double sp = 0.0;
    for (std::size_t k = 0; k < substeps; ++k) {
      sq += torques[k][m] * torques[k][m];
      sp += std::abs(speeds[k][m]);
    }
    out[m] = {std::sqrt(sq / n), sp / n};
  }
  return out;
}

namespace {
constexpr std::array<ObsField, 6> kNominalLayout{{
    {"command", 0, 3},
    {"ang_vel", 3, 3},
    {"gravity", 6, 3},
    {"joint_pos", 9, 12},
    {"joint_vel", 21, 12},
    {"prev_action", 33, 12},
}};
constexpr std::array<ObsField, 8> kResidualLayout{{
    {"command", 0, 3},
    {"ang_vel", 3, 3},
    {"gravity", 6, 3},
    {"joint_pos", 9, 12},
    {"joint_vel", 21, 12},
    {"motor_temps", 33, 12},
    {"latent", 45, 16},
    {"prev_action", 61, 12},
}};

template <class Range>
void put(std::vector<double>& out, std::size_t offset, const Range& r) {
  std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
}
template <class Array>
void take(const std::vector<double>& in, std::size_t offset, Array& a) {
  std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(offset), a.size(), a.begin());
}
}  // namespace

std::span<const ObsField> observation_layout(ObsLayout layout) {
  if (layout == ObsLayout::nominal) return kNominalLayout;
  return kResidualLayout;
}

std::size_t observation_size(ObsLayout layout) {
  return layout == ObsLayout::nominal ? kNominalObsSize : kResidualObsSize;
}

std::string_view to_string(ObsLayout layout) {
  return layout == ObsLayout::nominal ? "nominal" : "residual";
}

ObservationVector assemble(const ObservationParts& p, ObsLayout layout) {
  ObservationVector obs{layout, std::vector<double>(observation_size(layout), 0.0)};
  for (const auto& f : observation_layout(layout)) {
    const std::string_view n = f.name;
    if (n == "command") put(obs.values, f.offset, p.command);
    else if (n == "ang_vel") put(obs.values, f.offset, p.ang_vel);
    else if (n == "gravity") put(obs.values, f.offset, p.gravity);
    else if (n == "joint_pos") put(obs.values, f.offset, p.joint_pos);
    else if (n == "joint_vel") put(obs.values, f.offset, p.joint_vel);
    else if (n == "motor_temps") put(obs.values, f.offset, p.motor_temps);
    else if (n == "latent") put(obs.values, f.offset, p.latent);
    else if (n == "prev_action") put(obs.values, f.offset, p.prev_action);
  }
  return obs;
}

ObservationParts deassemble(const ObservationVector& obs) {
  if (obs.values.size() != observation_size(obs.layout)) {
    throw_dimension_mismatch("observation", observation_size(obs.layout), obs.values.size());
  }
  ObservationParts p;
  for (const auto& f : observation_layout(obs.layout)) {
    const std::string_view n = f.name;
    if (n == "command") take(obs.values, f.offset, p.command);
    else if (n == "ang_vel") take(obs.values, f.offset, p.ang_vel);
    else if (n == "gravity") take(obs.values, f.offset, p.gravity);
    else if (n == "joint_pos") take(obs.values, f.offset, p.joint_pos);
    else if (n == "joint_vel") take(obs.values, f.offset, p.joint_vel);
    else if (n == "motor_temps") take(obs.values, f.offset, p.motor_temps);
    else if (n == "latent") take(obs.values, f.offset, p.latent);
    else if (n == "prev_action") take(obs.values, f.offset, p.prev_action);
  }
  return p;
}

namespace {
ObservationParts common_parts(std::span<const double> command, std::span<const double> ang_vel,
                              std::span<const double> gravity, const JointState& js) {
  require_len(command, 3, "command");
  require_len(ang_vel, 3, "angular velocity");
  require_len(gravity, 3, "gravity");
  ObservationParts p;
  std::copy(command.begin(), command.end(), p.command.begin());
  std::copy(ang_vel.begin(), ang_vel.end(), p.ang_vel.begin());
  std::copy(gravity.begin(), gravity.end(), p.gravity.begin());
  p.joint_pos = js.position;
  p.joint_vel = js.velocity;
  return p;
}
}  // namespace

ObservationVector assemble_obs_nominal(std::span<const double> command, std::span<const double> ang_vel,
                                       std::span<const double> gravity, const JointState& js,
                                       std::span<const double> prev_action) {
  auto p = common_parts(command, ang_vel, gravity, js);
  require_joints(prev_action, "previous nominal action");
  std::copy(prev_action.begin(), prev_action.end(), p.prev_action.begin());
  return assemble(p, ObsLayout::nominal);
}

ObservationVector assemble_obs_residual(std::span<const double> command, std::span<const double> ang_vel,
                                        std::span<const double> gravity, const JointState& js,
                                        std::span<const double> motor_temps,
                                        std::span<const double> latent,
                                        std::span<const double> prev_residual_action) {
  auto p = common_parts(command, ang_vel, gravity, js);
  require_len(motor_temps, kNumMotors, "motor temperatures");
  require_len(latent, kLatentSize, "latent");
  require_joints(prev_residual_action, "previous residual action");
  std::copy(motor_temps.begin(), motor_temps.end(), p.motor_temps.begin());
  std::copy(latent.begin(), latent.end(), p.latent.begin());
  std::copy(prev_residual_action.begin(), prev_residual_action.end(), p.prev_action.begin());
  return assemble(p, ObsLayout::residual);
}

}  // namespace legtherm
