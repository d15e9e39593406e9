#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "legtherm/gait_proxy.hpp"
#include "legtherm/sim_config.hpp"

namespace legtherm {

struct CommandSegment {
  double duration = 0.0;  // s
  Command command;

  bool operator==(const CommandSegment&) const = default;
};

class CommandProfile {
 public:
  CommandProfile() = default;
  /// Throws Error(invalid_argument) on an empty list or a non-positive duration.
  explicit CommandProfile(std::vector<CommandSegment> segments);

  static CommandProfile constant(const Command& cmd, double duration);

  const std::vector<CommandSegment>& segments() const noexcept { return segments_; }
  double total_duration() const noexcept { return total_; }
  /// Command active at time t; past the end the last segment holds.
  const Command& command_at(double t) const;

  bool operator==(const CommandProfile& o) const { return segments_ == o.segments_; }

 private:
  std::vector<CommandSegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

/// Uniform draws of payload, CoM shift, external force, ambient and initial motor
/// temperatures (T_max + initial_temp_offset). The computer starts at the mean motor
/// temperature. Same seed, same setup.
AgentSetup sample_setup(std::uint64_t seed, const RandomizationRanges& ranges, double t_max);

/// Segments of length `segment` covering `duration`; the last one is truncated.
CommandProfile generate_command_profile(std::uint64_t seed, double duration, double segment,
                                        const CommandRanges& ranges);

/// +1 or -1, the side a governed agent turns toward when relieving heat.
double yaw_direction(std::uint64_t seed);

enum class ScenarioKind {
  long_horizon,  // randomized setup, all nodes start at long_horizon.initial_temp
  randomized,    // fully randomized setup and commands
  standing,      // randomized setup, zero command
};

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(std::string_view name);

struct Scenario {
  AgentSetup setup;
  CommandProfile profile;
};

Scenario make_scenario(const SimConfig& cfg, ScenarioKind kind, std::uint64_t seed, double duration);

}  // namespace legtherm
