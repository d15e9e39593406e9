#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "legtherm/control_compose.hpp"
#include "legtherm/gait_proxy.hpp"
#include "legtherm/heat_input.hpp"
#include "legtherm/reward_engine.hpp"
#include "legtherm/scenario.hpp"
#include "legtherm/sim_config.hpp"
#include "legtherm/thermal_core.hpp"

namespace legtherm {

/// Validated configuration plus the immutable objects derived from it. One context is
/// shared read-only by any number of agents on any number of threads.
class SimContext {
 public:
  explicit SimContext(SimConfig cfg);

  const SimConfig& config() const noexcept { return cfg_; }
  const ModelCache& cache() const noexcept { return cache_; }
  const ThermalNetwork& network() const noexcept { return cache_.network(); }
  const std::array<MotorElectricalParams, kNumMotors>& motor_params() const noexcept { return motor_params_; }

 private:
  SimConfig cfg_;
  ModelCache cache_;
  std::array<MotorElectricalParams, kNumMotors> motor_params_;
};

enum class PolicyMode {
  nominal_only,       // gait proxy alone
  governed,           // gait proxy plus scripted governor
  external_residual,  // caller supplies the residual action
  external_nominal,   // caller supplies the nominal action
};

std::string_view to_string(PolicyMode mode);
PolicyMode policy_mode_from_string(std::string_view name);
bool is_external(PolicyMode mode);

/// Everything produced by one 50 Hz step (or the initial state for step 0).
struct StepInfo {
  std::size_t step = 0;
  double time = 0.0;
  Command command;            // user command
  Command modulated_command;  // after the governor
  std::array<double, 3> achieved{};  // vx, vy, yaw rate
  JointArray a_nom{};
  JointArray a_res{};
  int clip_events = 0;
  int saturation_events = 0;
  HeatVector heat;
  TemperatureState temps;
  RewardBreakdown reward;
  double tracking_error = 0.0;
  double governor_weight = 0.0;
  std::array<double, 3> pose{};  // x, y, heading
  double distance = 0.0;         // path length travelled, m
  double lateral_deviation = 0.0;
};

class AgentSim {
 public:
  AgentSim(const SimContext& ctx, AgentSetup setup, CommandProfile profile, PolicyMode mode,
           double terrain_factor = 1.0);

  /// Advances one policy step. External modes require a 12-entry action in action units;
  /// the scripted modes require an empty span.
  const StepInfo& step(std::span<const double> action = {});

  const StepInfo& last() const noexcept { return info_; }
  const AgentSetup& setup() const noexcept { return setup_; }
  const CommandProfile& profile() const noexcept { return profile_; }
  PolicyMode mode() const noexcept { return mode_; }
  const JointState& joints() const noexcept { return joints_; }
  double dt() const noexcept { return dt_; }

  std::array<double, kNumMotors> motor_temps() const;
  /// Observation of the current state. The latent slot is zero; the residual layout's
  /// previous-action slot carries the last residual action.
  ObservationVector observation(ObsLayout layout) const;

 private:
  const SimContext& ctx_;
  AgentSetup setup_;
  CommandProfile profile_;
  PolicyMode mode_;
  double terrain_factor_;
  double dt_;
  double yaw_dir_;
  double lag_alpha_;

  double phase_ = 0.0;
  JointState joints_;
  std::array<double, 3> v_ach_{};
  std::array<double, 3> v_ref_{};
  std::array<double, 3> ref_pose_{};
  JointArray prev_action_{};   // last executed nominal action
  JointArray prev_action2_{};
  JointArray prev_res_{};
  JointArray prev_res2_{};
  StepInfo info_;
};

/// Time series of one episode. Row 0 is the initial state; row k follows step k.
struct EpisodeRecord {
  double dt = 0.0;
  bool detailed = true;
  std::vector<double> time;
  std::vector<std::array<double, kNumNodes>> temps;
  std::vector<Command> command;
  std::vector<Command> modulated_command;
  std::vector<std::array<double, 3>> achieved;
  std::vector<double> tracking_error;
  std::vector<double> governor_weight;
  std::vector<std::array<double, 3>> pose;
  std::vector<double> distance;
  std::vector<double> lateral_deviation;
  std::vector<int> clip_events;
  std::vector<int> saturation_events;
  // Detailed records only.
  std::vector<JointArray> a_nom;
  std::vector<JointArray> a_res;
  std::vector<std::array<double, kNumNodes>> heat;
  std::vector<RewardBreakdown> rewards;

  bool terminated = false;
  bool complete = false;
  std::optional<double> traversal_time;

  std::size_t size() const noexcept { return time.size(); }
  void reserve(std::size_t rows);
  void append(const StepInfo& info);
  /// True when every populated series has the same length and time strictly increases.
  bool consistent() const;
};

struct EpisodeOptions {
  bool detailed = true;
  double terrain_factor = 1.0;
  /// Defaults to the profile duration.
  std::optional<double> duration;
  /// Stop once forward progress reaches this distance; sets traversal_time.
  std::optional<double> goal_distance;
};

EpisodeRecord run_episode(const SimContext& ctx, const AgentSetup& setup, const CommandProfile& profile,
                          PolicyMode mode, const EpisodeOptions& options = {});

}  // namespace legtherm
