#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "legtherm/common.hpp"
#include "legtherm/heat_input.hpp"

namespace legtherm {

struct JointState {
  JointArray position{};  // rad
  JointArray velocity{};  // rad/s
};

struct PdGains {
  double kp = 40.0;  // N*m/rad
  double kd = 1.0;   // N*m*s/rad
  double torque_limit = 33.5;

  bool operator==(const PdGains&) const = default;
};

struct JointLimits {
  JointArray lower{};
  JointArray upper{};

  bool operator==(const JointLimits&) const = default;
};

/// A1-class joint range.
JointLimits default_joint_limits();
/// Standing pose used as theta_0.
JointArray default_joint_pose();

struct ComposedTarget {
  JointArray target{};
  int clip_events = 0;
};

/// Clamps each entry to +-clip and multiplies by `scale` (action units -> rad).
JointArray scale_action(std::span<const double> action, double scale, double clip);

/// theta_0 + a_nom + a_res, clamped to the joint limits. Offsets are in radians.
ComposedTarget compose_actions(std::span<const double> theta0, std::span<const double> a_nom,
                               std::span<const double> a_res, const JointLimits& limits);

/// clamp(kp (target - theta) - kd theta_dot, +-torque_limit)
JointArray pd_torque(const JointArray& target, const JointState& js, const PdGains& gains);

inline constexpr std::size_t kMaxSubsteps = 32;

/// Torques and joint speeds seen by the PD loop during one policy step.
struct ControlWindow {
  std::size_t substeps = 0;
  std::array<JointArray, kMaxSubsteps> torques{};
  std::array<JointArray, kMaxSubsteps> speeds{};
  int saturation_events = 0;

  /// Substep torques of one motor, for rms_torque.
  std::vector<double> torque_series(std::size_t motor) const;
  std::array<MotorWindow, kNumMotors> summarize() const;
};

/// Holds `target` for `substeps` PD evaluations. After each evaluation the harness
/// advances the plant: `advance(substep, torques, state)` updates `state` in place.
template <class PlantAdvance>
void control_cycle(const JointArray& target, JointState& state, const PdGains& gains,
                   std::size_t substeps, PlantAdvance&& advance, ControlWindow& out) {
  if (substeps < 1 || substeps > kMaxSubsteps) {
    throw Error(ErrorKind::invalid_argument, "substeps must be in 1.." + std::to_string(kMaxSubsteps));
  }
  out.substeps = substeps;
  out.saturation_events = 0;
  for (std::size_t k = 0; k < substeps; ++k) {
    const JointArray tau = pd_torque(target, state, gains);
    for (std::size_t j = 0; j < kNumMotors; ++j) {
      if (std::abs(tau[j]) >= gains.torque_limit) ++out.saturation_events;
    }
    out.torques[k] = tau;
    out.speeds[k] = state.velocity;
    advance(k, tau, state);
  }
}

enum class ObsLayout { nominal, residual };

struct ObsField {
  std::string_view name;
  std::size_t offset;
  std::size_t length;
};

inline constexpr std::size_t kNominalObsSize = 45;
inline constexpr std::size_t kResidualObsSize = 73;
inline constexpr std::size_t kLatentSize = 16;

std::span<const ObsField> observation_layout(ObsLayout layout);
std::size_t observation_size(ObsLayout layout);
std::string_view to_string(ObsLayout layout);

struct ObservationVector {
  ObsLayout layout = ObsLayout::nominal;
  std::vector<double> values;
};

/// Components of either layout; fields absent from the nominal layout stay zero.
struct ObservationParts {
  std::array<double, 3> command{};   // v_x, v_y, yaw rate
  std::array<double, 3> ang_vel{};
  std::array<double, 3> gravity{};
  JointArray joint_pos{};
  JointArray joint_vel{};
  std::array<double, kNumMotors> motor_temps{};
  std::array<double, kLatentSize> latent{};
  JointArray prev_action{};

  bool operator==(const ObservationParts&) const = default;
};

ObservationVector assemble_obs_nominal(std::span<const double> command, std::span<const double> ang_vel,
                                       std::span<const double> gravity, const JointState& js,
                                       std::span<const double> prev_action);

ObservationVector assemble_obs_residual(std::span<const double> command, std::span<const double> ang_vel,
                                        std::span<const double> gravity, const JointState& js,
                                        std::span<const double> motor_temps,
                                        std::span<const double> latent,
                                        std::span<const double> prev_residual_action);

ObservationVector assemble(const ObservationParts& parts, ObsLayout layout);
ObservationParts deassemble(const ObservationVector& obs);

}  // namespace legtherm
