#include "legtherm/reward_engine.hpp"

#include <algorithm>
#include <cmath>

namespace legtherm {

void validate(const RewardWeights& w) {
  std::vector<Issue> issues;
  const std::array<double, 18> all{w.lin_track,  w.ang_track,      w.lin_vel_z,   w.ang_vel_xy,
                                   w.orientation, w.joint_accel,   w.termination, w.body_height,
                                   w.foot_clearance, w.action_rate, w.smoothness, w.sigma_track,
                                   w.h_target,    w.pz_target,     w.t_max,       w.sigma_th,
                                   w.w_th,        w.w_reg};
  if (!std::all_of(all.begin(), all.end(), [](double x) { return std::isfinite(x); })) {
    issues.push_back({ErrorKind::config_error, "reward weights must be finite"});
  }
  if (!(w.sigma_track > 0.0)) issues.push_back({ErrorKind::non_positive_parameter, "sigma_track must be > 0"});
  if (!(w.sigma_th > 0.0)) issues.push_back({ErrorKind::non_positive_parameter, "sigma_th must be > 0"});
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::string_view to_string(ThermalWeightMode mode) {
  return mode == ThermalWeightMode::smooth ? "smooth" : "literal";
}

namespace {
constexpr std::array<std::string_view, kRewardTermCount> kTermNames{
    "lin_track",   "ang_track",   "lin_vel_z",      "ang_vel_xy", "orientation",
    "joint_accel", "termination", "body_height",    "foot_clearance", "action_rate",
    "smoothness",  "thermal",     "regularization"};

void require_joint_span(std::span<const double> v, std::string_view what) {
  if (v.size() != kNumMotors) throw_dimension_mismatch(what, kNumMotors, v.size());
}

double action_rate_sq(std::span<const double> a, std::span<const double> prev) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - prev[i];
    s += d * d;
  }
  return s;
}

double smoothness_sq(std::span<const double> a, std::span<const double> prev,
                     std::span<const double> prev2) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - 2.0 * prev[i] + prev2[i];
    s += d * d;
  }
  return s;
}

void finish(RewardBreakdown& b) {
  double total = 0.0;
  for (double t : b.terms) total += t;
  b.total = total;
}

void fill_task_terms(RewardBreakdown& b, const RewardSnapshot& s, const RewardWeights& w,
                     std::span<const double> a, std::span<const double> a1,
                     std::span<const double> a2) {
  auto set = [&b](RewardTerm t, double v) { b.terms[static_cast<std::size_t>(t)] = v; };

  const double dvx = s.v_cmd_xy[0] - s.v_xy[0];
  const double dvy = s.v_cmd_xy[1] - s.v_xy[1];
  const double dyaw = s.yaw_rate_cmd - s.yaw_rate;
  set(RewardTerm::lin_track, w.lin_track * std::exp(-(dvx * dvx + dvy * dvy) / w.sigma_track));
  set(RewardTerm::ang_track, w.ang_track * std::exp(-(dyaw * dyaw) / w.sigma_track));
  set(RewardTerm::lin_vel_z, w.lin_vel_z * s.v_z * s.v_z);
  set(RewardTerm::ang_vel_xy,
      w.ang_vel_xy * (s.omega_xy[0] * s.omega_xy[0] + s.omega_xy[1] * s.omega_xy[1]));
  set(RewardTerm::orientation,
      w.orientation * (s.gravity_xy[0] * s.gravity_xy[0] + s.gravity_xy[1] * s.gravity_xy[1]));
  double acc = 0.0;
  for (double q : s.joint_accels) acc += q * q;
  set(RewardTerm::joint_accel, w.joint_accel * acc);
  set(RewardTerm::termination, s.terminated ? w.termination : 0.0);
  const double dh = w.h_target - s.body_height;
  set(RewardTerm::body_height, w.body_height * dh * dh);
  double clearance = 0.0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const double dz = w.pz_target - s.foot_heights[i];
    clearance += dz * dz * s.foot_xy_speeds[i];
  }
  set(RewardTerm::foot_clearance, w.foot_clearance * clearance);
  set(RewardTerm::action_rate, w.action_rate * action_rate_sq(a, a1));
  set(RewardTerm::smoothness, w.smoothness * smoothness_sq(a, a1, a2));
}

}  // namespace

std::string_view reward_term_name(RewardTerm term) {
  return kTermNames[static_cast<std::size_t>(term)];
}

std::string_view reward_term_name(std::size_t index) { return kTermNames.at(index); }

double RewardBreakdown::nominal_subtotal() const {
  double s = 0.0;
  for (std::size_t i = 0; i < kNominalTermCount; ++i) s += terms[i];
  return s;
}

RewardBreakdown nominal_rewards(const RewardSnapshot& snap, const RewardWeights& w) {
  RewardBreakdown b;
  fill_task_terms(b, snap, w, snap.action, snap.action_prev, snap.action_prev2);
  finish(b);
  return b;
}

double thermal_weight(double temp, const RewardWeights& w, ThermalWeightMode mode) {
  if (mode == ThermalWeightMode::smooth) return std::exp(w.sigma_th * (temp - w.t_max));
  return std::exp(-std::min(w.sigma_th * (w.t_max - temp), 0.0));
}

double thermal_reward(const ThermalRewardInput& inp, const RewardWeights& w, ThermalWeightMode mode) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumMotors; ++i) {
    sum += inp.temp_rates[i] * thermal_weight(inp.temps[i], w, mode);
  }
  return w.w_th * sum;
}

double regularization_reward(std::span<const double> a_res, const RewardWeights& w) {
  require_joint_span(a_res, "residual action");
  double sq = 0.0;
  for (double a : a_res) sq += a * a;
  return w.w_reg * sq;
}

RewardBreakdown residual_total(const RewardSnapshot& snap, const ThermalRewardInput& thermal,
                               std::span<const double> a_res, std::span<const double> a_res_prev,
                               std::span<const double> a_res_prev2, const RewardWeights& w,
                               ThermalWeightMode mode) {
  require_joint_span(a_res, "residual action");
  require_joint_span(a_res_prev, "previous residual action");
  require_joint_span(a_res_prev2, "residual action two steps back");
  RewardBreakdown b;
  fill_task_terms(b, snap, w, a_res, a_res_prev, a_res_prev2);
  b.terms[static_cast<std::size_t>(RewardTerm::thermal)] = thermal_reward(thermal, w, mode);
  b.terms[static_cast<std::size_t>(RewardTerm::regularization)] = regularization_reward(a_res, w);
  finish(b);
  return b;
}

}  // namespace legtherm
