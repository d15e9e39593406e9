#include "legtherm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "legtherm/rng.hpp"

namespace legtherm {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        abort = true;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::size_t default_workers() {
  if (const char* env = std::getenv("LEGTHERM_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
  }
  return 1;
}

LongHorizonResult long_horizon_experiment(const SimContext& ctx, const LongHorizonOptions& opts) {
  if (opts.n_agents < 1) throw Error(ErrorKind::invalid_argument, "n_agents must be at least 1");
  if (is_external(opts.mode)) throw Error(ErrorKind::invalid_argument, "batch runs need a scripted mode");
  const SimConfig& cfg = ctx.config();
  LongHorizonResult res;
  res.options = opts;
  res.agents.resize(opts.n_agents);

  parallel_for(opts.n_agents, opts.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(opts.seed, i);
    RandomizationRanges ranges = cfg.randomization;
    ranges.payload = cfg.long_horizon.payload;
    AgentSetup setup = sample_setup(seed, ranges, cfg.rewards.t_max);
    setup.initial_motor_temps.fill(cfg.long_horizon.initial_temp);
    setup.initial_computer_temp = cfg.long_horizon.initial_temp;
    const CommandProfile profile = generate_command_profile(seed, opts.duration, opts.segment, cfg.commands);

    EpisodeOptions eo;
    eo.detailed = false;
    const EpisodeRecord rec = run_episode(ctx, setup, profile, opts.mode, eo);

    AgentMetrics& m = res.agents[i];
    m.index = i;
    m.seed = seed;
    m.payload = setup.payload_mass;
    m.ambient = setup.ambient_temp;
    m.mean_tracking_error = mean_tracking_error(rec);
    m.max_motor_temp = max_motor_temp(rec);
    m.overheat_time = first_crossing(rec, cfg.outcome.t_max);
    m.outcome = classify_outcome(rec, cfg.outcome);
  });

  std::size_t overheated = 0;
  for (const auto& m : res.agents) {
    if (m.overheat_time) ++overheated;
    res.mean_tracking_error += m.mean_tracking_error;
    res.mean_max_temp += m.max_motor_temp;
    ++res.histogram[static_cast<std::size_t>(m.outcome)];
  }
  const auto n = static_cast<double>(opts.n_agents);
  res.overheat_fraction = static_cast<double>(overheated) / n;
  res.mean_tracking_error /= n;
  res.mean_max_temp /= n;
  return res;
}

std::string_view to_string(Terrain t) { return t == Terrain::stairs ? "stairs" : "slope"; }

Terrain terrain_from_string(std::string_view name) {
  if (name == "stairs") return Terrain::stairs;
  if (name == "slope") return Terrain::slope;
  throw Error(ErrorKind::invalid_argument, "unknown terrain '" + std::string(name) + "'");
}

const TerrainProfile& terrain_profile(const TerrainConfig& cfg, Terrain t) {
  return t == Terrain::stairs ? cfg.stairs : cfg.slope;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

TerrainSuiteResult terrain_trial_suite(const SimContext& ctx, const TerrainSuiteOptions& opts) {
  if (opts.n_trials < 1) throw Error(ErrorKind::invalid_argument, "n_trials must be at least 1");
  if (is_external(opts.mode)) throw Error(ErrorKind::invalid_argument, "terrain trials need a scripted mode");
  const SimConfig& cfg = ctx.config();
  const TerrainConfig& tc = cfg.terrain;
  const double factor = terrain_profile(tc, opts.terrain).torque_factor;

  TerrainSuiteResult res;
  res.options = opts;
  res.levels.resize(opts.initial_temps.size());
  const std::size_t n_levels = opts.initial_temps.size();
  for (std::size_t l = 0; l < n_levels; ++l) {
    res.levels[l].initial_temp = opts.initial_temps[l];
    res.levels[l].trials.resize(opts.n_trials);
    res.levels[l].traversal_times.resize(opts.n_trials);
  }

  parallel_for(n_levels * opts.n_trials, opts.workers, [&](std::size_t item) {
    const std::size_t l = item / opts.n_trials;
    const std::size_t i = item % opts.n_trials;
    const std::uint64_t seed = derive_seed(opts.seed, i);
    AgentSetup setup = sample_setup(seed, cfg.randomization, cfg.rewards.t_max);
    setup.payload_mass = tc.payload;
    setup.initial_motor_temps.fill(opts.initial_temps[l]);
    setup.initial_computer_temp = opts.initial_temps[l];
    const CommandProfile profile = CommandProfile::constant({tc.command_speed, 0.0, 0.0}, tc.max_time);

    EpisodeOptions eo;
    eo.detailed = false;
    eo.terrain_factor = factor;
    eo.goal_distance = tc.length;
    const EpisodeRecord rec = run_episode(ctx, setup, profile, opts.mode, eo);

    AgentMetrics& m = res.levels[l].trials[i];
    m.index = i;
    m.seed = seed;
    m.payload = setup.payload_mass;
    m.ambient = setup.ambient_temp;
    m.mean_tracking_error = mean_tracking_error(rec);
    m.max_motor_temp = max_motor_temp(rec);
    m.overheat_time = first_crossing(rec, cfg.outcome.t_max);
    m.outcome = classify_outcome(rec, cfg.outcome);
    res.levels[l].traversal_times[i] = rec.traversal_time;
  });

  for (auto& level : res.levels) {
    std::vector<double> times;
    double peak = 0.0;
    for (std::size_t i = 0; i < opts.n_trials; ++i) {
      const AgentMetrics& m = level.trials[i];
      ++level.histogram[static_cast<std::size_t>(m.outcome)];
      peak += m.max_motor_temp;
      if (m.outcome == Outcome::success && level.traversal_times[i]) times.push_back(*level.traversal_times[i]);
    }
    level.mean_peak_temp = peak / static_cast<double>(opts.n_trials);
    level.traversal.count = times.size();
    if (!times.empty()) {
      level.traversal.p05 = quantile(times, 0.05);
      level.traversal.p50 = quantile(times, 0.5);
      level.traversal.p95 = quantile(times, 0.95);
      double s = 0.0;
      for (double t : times) s += t;
      level.traversal.mean = s / static_cast<double>(times.size());
    }
  }
  return res;
}

std::optional<double> time_to_threshold(const SimContext& ctx, PolicyMode mode, double payload, double speed,
                                        double threshold, double max_time) {
  AgentSetup setup;
  setup.payload_mass = payload;
  setup.ambient_temp = ctx.network().ambient_temp();
  setup.initial_motor_temps.fill(setup.ambient_temp);
  setup.initial_computer_temp = setup.ambient_temp;
  AgentSim sim(ctx, setup, CommandProfile::constant({speed, 0.0, 0.0}, max_time), mode);
  const auto steps = static_cast<std::size_t>(std::llround(max_time / sim.dt()));
  for (std::size_t k = 0; k < steps; ++k) {
    const StepInfo& s = sim.step();
    for (std::size_t i = 0; i < kNumMotors; ++i) {
      if (s.temps.temps[static_cast<Eigen::Index>(i)] > threshold) return s.time;
    }
  }
  return std::nullopt;
}

HeatVector mean_heat_input(const SimContext& ctx, double payload, double speed, double duration) {
  AgentSetup setup;
  setup.payload_mass = payload;
  setup.ambient_temp = ctx.network().ambient_temp();
  setup.initial_motor_temps.fill(setup.ambient_temp);
  setup.initial_computer_temp = setup.ambient_temp;
  AgentSim sim(ctx, setup, CommandProfile::constant({speed, 0.0, 0.0}, duration), PolicyMode::nominal_only);
  const auto steps = std::max<long long>(1, std::llround(duration / sim.dt()));
  HeatVector mean;
  for (long long k = 0; k < steps; ++k) mean.q += sim.step().heat.q;
  mean.q /= static_cast<double>(steps);
  return mean;
}

}  // namespace legtherm
