#include "legtherm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "legtherm/rng.hpp"

namespace legtherm {
namespace {

constexpr std::uint64_t kCommandStream = 0x636f6d6d616e64ULL;

}  // namespace

CommandProfile::CommandProfile(std::vector<CommandSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorKind::invalid_argument, "command profile has no segments");
  starts_.reserve(segments_.size());
  for (const auto& s : segments_) {
    if (!(s.duration > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "command segment duration must be positive");
    }
    starts_.push_back(total_);
    total_ += s.duration;
  }
}

CommandProfile CommandProfile::constant(const Command& cmd, double duration) {
  return CommandProfile({{duration, cmd}});
}

const Command& CommandProfile::command_at(double t) const {
  if (segments_.empty()) throw Error(ErrorKind::invalid_argument, "empty command profile");
  const double key = t + 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::upper_bound(starts_.begin(), starts_.end(), key);
  const auto idx = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  return segments_[idx].command;
}

AgentSetup sample_setup(std::uint64_t seed, const RandomizationRanges& r, double t_max) {
  Rng rng(seed);
  AgentSetup s;
  s.seed = seed;
  s.payload_mass = rng.uniform(r.payload.lo, r.payload.hi);
  for (auto& c : s.com_shift) c = rng.uniform(r.com_shift.lo, r.com_shift.hi);
  for (auto& f : s.external_force) f = rng.uniform(r.external_force.lo, r.external_force.hi);
  s.ambient_temp = rng.uniform(r.ambient.lo, r.ambient.hi);
  double sum = 0.0;
  for (auto& t : s.initial_motor_temps) {
    t = t_max + rng.uniform(r.initial_temp_offset.lo, r.initial_temp_offset.hi);
    sum += t;
  }
  s.initial_computer_temp = sum / static_cast<double>(kNumMotors);
  return s;
}

CommandProfile generate_command_profile(std::uint64_t seed, double duration, double segment,
                                        const CommandRanges& r) {
  if (!(duration > 0.0) || !(segment > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "duration and segment must be positive");
  }
  Rng rng(derive_seed(seed, kCommandStream));
  const auto n = static_cast<std::size_t>(std::ceil(duration / segment - 1e-9));
  std::vector<CommandSegment> segs;
  segs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CommandSegment s;
    s.duration = i + 1 < n ? segment : duration - segment * static_cast<double>(n - 1);
    s.command.vx = rng.uniform(r.vx.lo, r.vx.hi);
    s.command.vy = rng.uniform(r.vy.lo, r.vy.hi);
    s.command.yaw = rng.uniform(r.yaw.lo, r.yaw.hi);
    segs.push_back(s);
  }
  return CommandProfile(std::move(segs));
}

double yaw_direction(std::uint64_t seed) { return (splitmix64(seed ^ 0x796177ULL) & 1U) ? 1.0 : -1.0; }

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::long_horizon:
      return "long-horizon";
    case ScenarioKind::randomized:
      return "randomized";
    case ScenarioKind::standing:
      return "standing";
  }
  return "?";
}

ScenarioKind scenario_from_string(std::string_view name) {
  for (auto k : {ScenarioKind::long_horizon, ScenarioKind::randomized, ScenarioKind::standing}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::invalid_argument, "unknown scenario '" + std::string(name) + "'");
}

Scenario make_scenario(const SimConfig& cfg, ScenarioKind kind, std::uint64_t seed, double duration) {
  Scenario sc;
  switch (kind) {
    case ScenarioKind::long_horizon: {
      RandomizationRanges ranges = cfg.randomization;
      ranges.payload = cfg.long_horizon.payload;
      sc.setup = sample_setup(seed, ranges, cfg.rewards.t_max);
      sc.setup.initial_motor_temps.fill(cfg.long_horizon.initial_temp);
      sc.setup.initial_computer_temp = cfg.long_horizon.initial_temp;
      sc.profile = generate_command_profile(seed, duration, cfg.long_horizon.segment, cfg.commands);
      break;
    }
    case ScenarioKind::randomized:
      sc.setup = sample_setup(seed, cfg.randomization, cfg.rewards.t_max);
      sc.profile = generate_command_profile(seed, duration, cfg.long_horizon.segment, cfg.commands);
      break;
    case ScenarioKind::standing:
      sc.setup = sample_setup(seed, cfg.randomization, cfg.rewards.t_max);
      sc.profile = CommandProfile::constant({}, duration);
      break;
  }
  return sc;
}

}  // namespace legtherm
