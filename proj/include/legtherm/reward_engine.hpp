#pragma once

#include <array>
#include <span>
#include <string_view>

#include "legtherm/common.hpp"

namespace legtherm {

struct RewardWeights {
  // Task terms.
  double lin_track = 1.0;
  double ang_track = 0.5;
  double lin_vel_z = -2.0;
  double ang_vel_xy = -0.05;
  double orientation = -0.2;
  double joint_accel = -2.5e-7;
  double termination = -200.0;
  double body_height = -1.0;
  double foot_clearance = -0.01;
  double action_rate = -0.01;
  double smoothness = -0.01;
  double sigma_track = 0.25;
  double h_target = 0.38;   // m
  double pz_target = 0.2;   // m
  // Thermal safety and residual regularization.
  double t_max = 60.0;      // degC
  double sigma_th = 0.35;   // 1/degC
  double w_th = -1000.0;
  double w_reg = -0.1;

  bool operator==(const RewardWeights&) const = default;
};

void validate(const RewardWeights& w);

struct RewardSnapshot {
  std::array<double, 2> v_cmd_xy{};
  std::array<double, 2> v_xy{};
  double yaw_rate_cmd = 0.0;
  double yaw_rate = 0.0;
  double v_z = 0.0;
  std::array<double, 2> omega_xy{};
  /// Gravity direction projected onto the body xy-plane.
  std::array<double, 2> gravity_xy{};
  JointArray joint_accels{};
  double body_height = 0.0;
  std::array<double, kNumLegs> foot_heights{};
  std::array<double, kNumLegs> foot_xy_speeds{};
  JointArray action{};
  JointArray action_prev{};
  JointArray action_prev2{};
  bool terminated = false;
};

struct ThermalRewardInput {
  std::array<double, kNumMotors> temps{};       // degC
  std::array<double, kNumMotors> temp_rates{};  // degC/s
};

enum class ThermalWeightMode { smooth, literal };

std::string_view to_string(ThermalWeightMode mode);

enum class RewardTerm : std::size_t {
  lin_track,
  ang_track,
  lin_vel_z,
  ang_vel_xy,
  orientation,
  joint_accel,
  termination,
  body_height,
  foot_clearance,
  action_rate,
  smoothness,
  thermal,
  regularization,
};
inline constexpr std::size_t kRewardTermCount = 13;
inline constexpr std::size_t kNominalTermCount = 11;

std::string_view reward_term_name(RewardTerm term);
std::string_view reward_term_name(std::size_t index);

/// Per-term rewards. `total` is the left-to-right sum of `terms`, so it always
/// matches a re-summation of the breakdown in the same order.
struct RewardBreakdown {
  std::array<double, kRewardTermCount> terms{};
  double total = 0.0;

  double operator[](RewardTerm t) const { return terms[static_cast<std::size_t>(t)]; }
  double nominal_subtotal() const;
};

/// Table of task rewards; the thermal and regularization entries are zero.
RewardBreakdown nominal_rewards(const RewardSnapshot& snap, const RewardWeights& w);

/// smooth:  exp(sigma_th (T - T_max))            -- vanishes far below the threshold
/// literal: exp(-min(sigma_th (T_max - T), 0))   -- exactly 1 at or below the threshold
double thermal_weight(double temp, const RewardWeights& w, ThermalWeightMode mode);

double thermal_reward(const ThermalRewardInput& inp, const RewardWeights& w, ThermalWeightMode mode);

double regularization_reward(std::span<const double> a_res, const RewardWeights& w);

/// Residual-stage reward: thermal + regularization + task terms, where the action-rate
/// and smoothness terms are evaluated on the residual action history rather than on
/// whatever actions `snap` carries.
RewardBreakdown residual_total(const RewardSnapshot& snap, const ThermalRewardInput& thermal,
                               std::span<const double> a_res, std::span<const double> a_res_prev,
                               std::span<const double> a_res_prev2, const RewardWeights& w,
                               ThermalWeightMode mode);

}  // namespace legtherm
