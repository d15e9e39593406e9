#include "legtherm/vec_env.hpp"

namespace legtherm {

VecEnv::VecEnv(SimConfig cfg, EnvOptions options)
    : ctx_(std::make_unique<SimContext>(std::move(cfg))), options_(options) {
  if (options_.batch < 1) throw Error(ErrorKind::invalid_argument, "batch must be at least 1");
  if (!is_external(options_.action_mode)) {
    throw Error(ErrorKind::invalid_argument, "action mode must be external_residual or external_nominal");
  }
}

const AgentSim& VecEnv::agent(std::size_t i) const {
  if (agents_.empty()) throw Error(ErrorKind::invalid_argument, "environment has not been reset");
  return *agents_.at(i);
}

void VecEnv::write_observations(EnvBatch& out) const {
  out.batch = batch();
  out.obs_size = obs_size();
  out.observations.resize(out.batch * out.obs_size);
  out.motor_temps.resize(out.batch * kNumMotors);
  for (std::size_t i = 0; i < out.batch; ++i) {
    const ObservationVector obs = agents_[i]->observation(options_.layout);
    std::copy(obs.values.begin(), obs.values.end(), out.observations.begin() + static_cast<std::ptrdiff_t>(i * out.obs_size));
    const auto t = agents_[i]->motor_temps();
    std::copy(t.begin(), t.end(), out.motor_temps.begin() + static_cast<std::ptrdiff_t>(i * kNumMotors));
  }
}

EnvBatch VecEnv::reset(std::span<const std::uint64_t> seeds) {
  if (seeds.size() != batch()) throw_dimension_mismatch("seeds", batch(), seeds.size());
  const SimConfig& cfg = ctx_->config();
  agents_.clear();
  for (std::uint64_t seed : seeds) {
    Scenario sc = make_scenario(cfg, options_.scenario, seed, cfg.env.episode_duration);
    agents_.push_back(std::make_unique<AgentSim>(*ctx_, std::move(sc.setup), std::move(sc.profile),
                                                 options_.action_mode));
  }
  EnvBatch out;
  write_observations(out);
  return out;
}

EnvStepResult VecEnv::step(std::span<const double> actions) {
  if (agents_.empty()) throw Error(ErrorKind::invalid_argument, "environment has not been reset");
  if (actions.size() != batch() * kNumMotors) {
    throw_dimension_mismatch("actions", batch() * kNumMotors, actions.size());
  }
  const SimConfig& cfg = ctx_->config();
  EnvStepResult out;
  out.rewards.resize(batch() * kRewardTermCount);
  out.totals.resize(batch());
  out.terminated.resize(batch());
  out.truncated.resize(batch());
  for (std::size_t i = 0; i < batch(); ++i) {
    const StepInfo& s = agents_[i]->step(actions.subspan(i * kNumMotors, kNumMotors));
    std::copy(s.reward.terms.begin(), s.reward.terms.end(),
              out.rewards.begin() + static_cast<std::ptrdiff_t>(i * kRewardTermCount));
    out.totals[i] = s.reward.total;
    bool hot = false;
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      if (s.temps.temps[static_cast<Eigen::Index>(m)] > cfg.env.termination_temp) hot = true;
    }
    out.terminated[i] = hot ? 1 : 0;
    out.truncated[i] = s.time >= cfg.env.episode_duration - 1e-9 ? 1 : 0;
  }
  write_observations(out);
  return out;
}

}  // namespace legtherm
