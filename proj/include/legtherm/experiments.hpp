#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "legtherm/agent_sim.hpp"
#include "legtherm/outcome.hpp"

namespace legtherm {

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware concurrency). Items are
/// claimed dynamically; fn must only touch state owned by item i. The first exception
/// thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Worker count from LEGTHERM_WORKERS, else 1.
std::size_t default_workers();

using OutcomeHistogram = std::array<std::size_t, kOutcomeCount>;

struct AgentMetrics {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double payload = 0.0;
  double ambient = 0.0;
  double mean_tracking_error = 0.0;
  double max_motor_temp = 0.0;
  std::optional<double> overheat_time;
  Outcome outcome = Outcome::success;
};

struct LongHorizonOptions {
  std::size_t n_agents = 1;
  double duration = 800.0;
  double segment = 30.0;
  PolicyMode mode = PolicyMode::nominal_only;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct LongHorizonResult {
  LongHorizonOptions options;
  std::vector<AgentMetrics> agents;
  double overheat_fraction = 0.0;
  double mean_tracking_error = 0.0;
  double mean_max_temp = 0.0;
  OutcomeHistogram histogram{};
};

/// Agent i uses derive_seed(seed, i) for setup and commands, so the same index under two
/// modes sees the same robot and the same command sequence. Results do not depend on
/// `workers`.
LongHorizonResult long_horizon_experiment(const SimContext& ctx, const LongHorizonOptions& opts);

enum class Terrain { stairs, slope };

std::string_view to_string(Terrain t);
Terrain terrain_from_string(std::string_view name);
const TerrainProfile& terrain_profile(const TerrainConfig& cfg, Terrain t);

struct TerrainSuiteOptions {
  Terrain terrain = Terrain::stairs;
  std::size_t n_trials = 1;
  std::vector<double> initial_temps{30.0, 50.0, 58.0};
  PolicyMode mode = PolicyMode::nominal_only;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct TraversalStats {
  std::size_t count = 0;
  double p05 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
};

struct TerrainLevelResult {
  double initial_temp = 0.0;
  OutcomeHistogram histogram{};
  TraversalStats traversal;  // successful trials only
  double mean_peak_temp = 0.0;
  std::vector<AgentMetrics> trials;
  std::vector<std::optional<double>> traversal_times;
};

struct TerrainSuiteResult {
  TerrainSuiteOptions options;
  std::vector<TerrainLevelResult> levels;
};

/// Straight runs over the configured horizontal length at the configured payload and
/// speed. Trial i uses derive_seed(seed, i) at every temperature level; a trial ends on
/// reaching the goal or after terrain.max_time.
TerrainSuiteResult terrain_trial_suite(const SimContext& ctx, const TerrainSuiteOptions& opts);

/// Linear-interpolated quantile of `values` (need not be sorted); q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Calibration run: straight walk at `speed` with `payload`, no external force, every node
/// starting at the network ambient. Returns the first time a motor exceeds `threshold`.
std::optional<double> time_to_threshold(const SimContext& ctx, PolicyMode mode, double payload, double speed,
                                        double threshold, double max_time);

/// Heat input averaged over `duration` seconds of a straight walk (nominal gait).
HeatVector mean_heat_input(const SimContext& ctx, double payload, double speed, double duration);

}  // namespace legtherm
