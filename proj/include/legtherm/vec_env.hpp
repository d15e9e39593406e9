#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "legtherm/agent_sim.hpp"

namespace legtherm {

struct EnvOptions {
  std::size_t batch = 1;
  ObsLayout layout = ObsLayout::residual;
  ScenarioKind scenario = ScenarioKind::randomized;
  /// external_residual or external_nominal.
  PolicyMode action_mode = PolicyMode::external_residual;
};

struct EnvBatch {
  std::size_t batch = 0;
  std::size_t obs_size = 0;
  std::vector<double> observations;  // batch x obs_size, row-major
  std::vector<double> motor_temps;   // batch x 12
};

struct EnvStepResult : EnvBatch {
  std::vector<double> rewards;  // batch x kRewardTermCount
  std::vector<double> totals;   // batch
  std::vector<std::uint8_t> terminated;  // a motor passed env.termination_temp
  std::vector<std::uint8_t> truncated;   // episode duration reached
};

/// Batch of agents driven by caller-supplied actions. Agents do not reset on their own;
/// stepping a finished agent keeps simulating it.
class VecEnv {
 public:
  VecEnv(SimConfig cfg, EnvOptions options);

  /// One seed per agent; each agent gets make_scenario(scenario, seed).
  EnvBatch reset(std::span<const std::uint64_t> seeds);
  /// `actions` is batch x 12, row-major. Throws DimensionMismatch otherwise.
  EnvStepResult step(std::span<const double> actions);

  std::size_t batch() const noexcept { return options_.batch; }
  std::size_t obs_size() const noexcept { return observation_size(options_.layout); }
  const EnvOptions& options() const noexcept { return options_; }
  const SimContext& context() const noexcept { return *ctx_; }
  const AgentSim& agent(std::size_t i) const;

 private:
  void write_observations(EnvBatch& out) const;

  std::unique_ptr<SimContext> ctx_;
  EnvOptions options_;
  std::vector<std::unique_ptr<AgentSim>> agents_;
};

}  // namespace legtherm
