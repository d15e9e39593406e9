#pragma once

#include <span>

#include "legtherm/gait_proxy.hpp"
#include "legtherm/reward_engine.hpp"
#include "legtherm/sim_config.hpp"

namespace legtherm {

struct GovernorOutput {
  JointArray residual{};  // action units
  Command command;
  double weight = 0.0;
};

/// Governor engagement: the largest smooth thermal weight over the motors, clamped to [0, 1].
double governor_weight(std::span<const double> motor_temps, const RewardWeights& w);

/// Scripted residual policy. With engagement w the planar command is scaled by
/// (1 - max_command_scale_reduction * w), the yaw command gains yaw_direction *
/// yaw_relief_gain * w, and the residual is -w * max_amplitude_reduction * a_nom plus an
/// HAA steering bias orthogonal to a_nom. The bias leaves the executed gait amplitude at
/// exactly (1 - w * max_amplitude_reduction) of nominal. With a zero a_nom (standing) only
/// the command attenuation applies.
GovernorOutput governor_modulate(const Command& cmd, std::span<const double> a_nom,
                                 std::span<const double> motor_temps, const GovernorParams& p,
                                 const RewardWeights& w, double yaw_direction = 1.0);

/// 1 + <a_res, a_nom> / |a_nom|^2, the share of the nominal amplitude that is executed.
/// Returns 1 when a_nom is zero.
double amplitude_ratio(std::span<const double> a_nom, std::span<const double> a_res);

}  // namespace legtherm
