#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "legtherm/config_io.hpp"
#include "legtherm/experiments.hpp"
#include "legtherm/report_io.hpp"

namespace fs = std::filesystem;
using namespace legtherm;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t workers = default_workers();
  std::optional<double> bucket_width;
};

struct LoadedConfig {
  SimConfig cfg;
  std::string source;
  std::string checksum;
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

LoadedConfig load(const CommonFlags& flags) {
  LoadedConfig lc;
  std::string bytes;
  if (flags.config.empty()) {
    bytes = serialize_config(default_sim_config());
    lc.source = "built-in defaults";
  } else {
    bytes = read_file(flags.config);
    lc.source = flags.config;
  }
  lc.checksum = "sha256:" + sha256_hex(bytes);
  lc.cfg = parse_config(bytes);
  if (flags.bucket_width) {
    lc.cfg.thermal.bucket_width = *flags.bucket_width;
    validate(lc.cfg);
  }
  return lc;
}

class Output {
 public:
  Output(const CommonFlags& flags, const LoadedConfig& lc, std::string subcommand, std::vector<std::string> args)
      : dir_(flags.out) {
    if (dir_.empty()) return;
    fs::create_directories(dir_);
    json m = json::object();
    m["format"] = "legtherm-manifest/1";
    m["subcommand"] = std::move(subcommand);
    m["version"] = LEGTHERM_VERSION;
    m["timestamp"] = utc_timestamp();
    m["config_source"] = lc.source;
    m["config_checksum"] = lc.checksum;
    m["seed"] = flags.seed;
    m["workers"] = flags.workers;
    m["arguments"] = std::move(args);
    m["config"] = json::parse(serialize_config(lc.cfg));
    write("manifest.json", m.dump(2) + "\n");
  }

  bool enabled() const { return !dir_.empty(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << text;
  }

  /// Writes to `name` when an output directory is set, else to stdout.
  void emit(const std::string& name, const std::string& text) const {
    if (enabled()) write(name, text);
    else std::cout << text;
  }

 private:
  fs::path dir_;
};

void add_common(CLI::App* sub, CommonFlags& f, bool needs_seed, bool needs_workers) {
  sub->add_option("--config", f.config, "JSON configuration file (defaults to the built-in config)");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--bucket-width", f.bucket_width, "Velocity bucket width for the model cache [m/s]");
  if (needs_seed) sub->add_option("--seed", f.seed, "Master seed");
  if (needs_workers) {
    sub->add_option("--workers", f.workers, "Worker threads (default from LEGTHERM_WORKERS, else 1)");
  }
}

std::vector<std::vector<double>> read_actions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot read actions file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw Error(ErrorKind::invalid_argument, "non-numeric row in actions file: " + line);
    }
    if (row.size() != kNumMotors) throw_dimension_mismatch("actions row", kNumMotors, row.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string steady_state_report(const SimContext& ctx, double payload, double speed) {
  const HeatVector heat = mean_heat_input(ctx, payload, speed, 1.0);
  const TemperatureState ss = steady_state(ctx.network(), heat, speed);
  const auto labels = node_labels();
  std::ostringstream out;
  out << "node,label,heat_w,steady_temp_c\n";
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    out << i << ',' << labels[i] << ',' << format_double(heat.q[e]) << ',' << format_double(ss.temps[e]) << '\n';
  }
  return out.str();
}

json episode_summary(const EpisodeRecord& rec, const SimConfig& cfg, const Scenario& sc, PolicyMode mode) {
  json j = json::object();
  j["format"] = std::string(kSummaryFormat);
  j["kind"] = "episode";
  j["mode"] = std::string(to_string(mode));
  j["seed"] = sc.setup.seed;
  j["steps"] = rec.size() - 1;
  j["duration"] = rec.time.back();
  j["payload"] = sc.setup.payload_mass;
  j["ambient"] = sc.setup.ambient_temp;
  j["mean_tracking_error"] = mean_tracking_error(rec);
  j["max_motor_temp"] = max_motor_temp(rec);
  const auto cross = first_crossing(rec, cfg.outcome.t_max);
  j["overheat_time"] = cross ? json(*cross) : json(nullptr);
  j["outcome"] = std::string(to_string(classify_outcome(rec, cfg.outcome)));
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-aware legged locomotion simulator"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", LEGTHERM_VERSION);
  const std::vector<std::string> args(argv + 1, argv + argc);

  CommonFlags flags;

  auto* validate_cmd = app.add_subcommand("validate-config", "Validate a configuration and report steady states");
  add_common(validate_cmd, flags, false, false);

  auto* simulate_cmd = app.add_subcommand("simulate", "Run one episode and write its trace");
  add_common(simulate_cmd, flags, true, false);
  std::string sim_mode = "governed";
  std::string sim_scenario = "long-horizon";
  double sim_duration = 60.0;
  std::string sim_actions;
  simulate_cmd->add_option("--mode", sim_mode,
                           "nominal_only | governed | external_residual | external_nominal");
  simulate_cmd->add_option("--scenario", sim_scenario, "long-horizon | randomized | standing");
  simulate_cmd->add_option("--duration", sim_duration, "Episode length [s]");
  simulate_cmd->add_option("--actions", sim_actions, "CSV of 12 actions per step for external modes");

  auto* batch_cmd = app.add_subcommand("batch", "Long-horizon experiment over many agents");
  add_common(batch_cmd, flags, true, true);
  std::size_t batch_agents = 16;
  std::optional<double> batch_duration;
  std::string batch_mode = "governed";
  batch_cmd->add_option("--agents", batch_agents, "Number of agents");
  batch_cmd->add_option("--duration", batch_duration, "Episode length [s] (default from config)");
  batch_cmd->add_option("--mode", batch_mode, "nominal_only | governed");

  auto* terrain_cmd = app.add_subcommand("terrain-suite", "Stairs or slope traversal trials");
  add_common(terrain_cmd, flags, true, true);
  std::string terrain_name = "stairs";
  std::size_t terrain_trials = 20;
  std::vector<double> terrain_temps{30.0, 50.0, 58.0};
  std::string terrain_mode = "governed";
  terrain_cmd->add_option("--terrain", terrain_name, "stairs | slope");
  terrain_cmd->add_option("--trials", terrain_trials, "Trials per temperature level");
  terrain_cmd->add_option("--temps", terrain_temps, "Initial temperature levels [degC]")->delimiter(',');
  terrain_cmd->add_option("--mode", terrain_mode, "nominal_only | governed");

  auto* sweep_cmd = app.add_subcommand("reward-sweep", "Tabulate the thermal weight and reward in both modes");
  add_common(sweep_cmd, flags, false, false);
  double sweep_min = 20.0;
  double sweep_max = 80.0;
  double sweep_step = 1.0;
  sweep_cmd->add_option("--t-min", sweep_min, "First temperature [degC]");
  sweep_cmd->add_option("--t-max", sweep_max, "Last temperature [degC]");
  double sweep_rate = 0.1;
  sweep_cmd->add_option("--step", sweep_step, "Temperature step [degC]");
  sweep_cmd->add_option("--rate", sweep_rate, "Heating rate of the single motor in the reward columns [degC/s]");

  auto* steady_cmd = app.add_subcommand("steady-state", "Steady node temperatures for a constant gait");
  add_common(steady_cmd, flags, false, false);
  double steady_payload = 0.0;
  double steady_speed = 0.0;
  steady_cmd->add_option("--payload", steady_payload, "Payload [kg]");
  steady_cmd->add_option("--speed", steady_speed, "Forward speed [m/s]");

  auto* layout_cmd = app.add_subcommand("layout", "Export the observation layout tables");
  add_common(layout_cmd, flags, false, false);

  auto* plot_cmd = app.add_subcommand("plot-data", "Tracking error vs peak temperature for both modes");
  add_common(plot_cmd, flags, true, true);
  std::size_t plot_agents = 16;
  std::optional<double> plot_duration;
  plot_cmd->add_option("--agents", plot_agents, "Number of agents");
  plot_cmd->add_option("--duration", plot_duration, "Episode length [s] (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  LoadedConfig lc;
  try {
    lc = load(flags);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const SimConfig& cfg = lc.cfg;
    CLI::App* sub = app.get_subcommands().front();
    const Output out(flags, lc, sub->get_name(), args);

    if (sub == validate_cmd) {
      SimContext ctx(cfg);
      const ThermalNetwork& net = ctx.network();
      std::size_t convective = 0;
      for (const auto& e : net.edges()) convective += e.convective ? 1 : 0;
      std::ostringstream report;
      report << "config OK (" << lc.source << ", " << lc.checksum << ")\n";
      report << "nodes: " << net.nodes().size() << " (12 motors, computer, ambient at "
             << format_double(net.ambient_temp()) << " C)\n";
      report << "edges: " << net.edges().size() << " (" << net.edges().size() - convective << " conduction, "
             << convective << " convective)\n";
      for (const auto& [label, payload, speed] :
           {std::tuple{"standing, no payload", 0.0, 0.0}, std::tuple{"walking 1 m/s, 3 kg", 3.0, 1.0}}) {
        const HeatVector heat = mean_heat_input(ctx, payload, speed, 1.0);
        const TemperatureState ss = steady_state(net, heat, speed);
        report << "steady state, " << label << ": total heat " << format_double(heat.total())
               << " W, hottest motor " << format_double(ss.max_motor()) << " C, computer "
               << format_double(ss.temps[kComputerNode]) << " C\n";
      }
      std::cout << report.str();
      if (out.enabled()) out.write("report.txt", report.str());
      return 0;
    }

    if (sub == simulate_cmd) {
      const PolicyMode mode = policy_mode_from_string(sim_mode);
      const Scenario sc = make_scenario(cfg, scenario_from_string(sim_scenario), flags.seed, sim_duration);
      SimContext ctx(cfg);
      AgentSim sim(ctx, sc.setup, sc.profile, mode);
      const auto steps = static_cast<std::size_t>(std::llround(sim_duration / sim.dt()));
      std::vector<std::vector<double>> actions;
      if (!sim_actions.empty()) {
        if (!is_external(mode)) throw Error(ErrorKind::invalid_argument, "--actions needs an external mode");
        actions = read_actions(sim_actions);
        if (actions.size() < steps) {
          throw Error(ErrorKind::dimension_mismatch, "actions file has " + std::to_string(actions.size()) +
                                                         " rows, episode needs " + std::to_string(steps));
        }
      }
      const std::vector<double> zero(kNumMotors, 0.0);
      EpisodeRecord rec;
      rec.dt = sim.dt();
      rec.reserve(steps + 1);
      rec.append(sim.last());
      for (std::size_t k = 0; k < steps; ++k) {
        if (!is_external(mode)) rec.append(sim.step());
        else rec.append(sim.step(actions.empty() ? zero : actions[k]));
      }
      rec.complete = true;
      std::ostringstream trace;
      write_trace_csv(trace, rec);
      out.emit("trace.csv", trace.str());
      const json summary = episode_summary(rec, cfg, sc, mode);
      if (out.enabled()) {
        out.write("summary.json", summary.dump(2) + "\n");
        std::cout << summary.dump(2) << '\n';
      }
      return 0;
    }

    if (sub == batch_cmd) {
      SimContext ctx(cfg);
      LongHorizonOptions o;
      o.n_agents = batch_agents;
      o.duration = batch_duration.value_or(cfg.long_horizon.duration);
      o.segment = cfg.long_horizon.segment;
      o.mode = policy_mode_from_string(batch_mode);
      o.seed = flags.seed;
      o.workers = flags.workers;
      const LongHorizonResult res = long_horizon_experiment(ctx, o);
      const std::string summary = long_horizon_summary_json(res);
      out.emit("summary.json", summary);
      if (out.enabled()) {
        std::ostringstream scatter;
        write_scatter_csv(scatter, res);
        out.write("scatter.csv", scatter.str());
        std::cout << "agents " << res.agents.size() << ", overheat fraction " << format_double(res.overheat_fraction)
                  << ", mean tracking error " << format_double(res.mean_tracking_error) << '\n';
      }
      return 0;
    }

    if (sub == terrain_cmd) {
      SimContext ctx(cfg);
      TerrainSuiteOptions o;
      o.terrain = terrain_from_string(terrain_name);
      o.n_trials = terrain_trials;
      o.initial_temps = terrain_temps;
      o.mode = policy_mode_from_string(terrain_mode);
      o.seed = flags.seed;
      o.workers = flags.workers;
      const TerrainSuiteResult res = terrain_trial_suite(ctx, o);
      out.emit("summary.json", terrain_summary_json(res));
      if (out.enabled()) {
        for (const auto& l : res.levels) {
          std::cout << "T0 " << format_double(l.initial_temp) << ":";
          for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            std::cout << ' ' << to_string(static_cast<Outcome>(i)) << '=' << l.histogram[i];
          }
          std::cout << '\n';
        }
      }
      return 0;
    }

    if (sub == sweep_cmd) {
      std::ostringstream csv;
      write_reward_sweep_csv(csv, cfg.rewards, sweep_min, sweep_max, sweep_step, sweep_rate);
      out.emit("reward_sweep.csv", csv.str());
      return 0;
    }

    if (sub == steady_cmd) {
      SimContext ctx(cfg);
      out.emit("steady_state.csv", steady_state_report(ctx, steady_payload, steady_speed));
      return 0;
    }

    if (sub == layout_cmd) {
      std::ostringstream csv;
      write_layout_csv(csv);
      out.emit("layout.csv", csv.str());
      if (out.enabled()) out.write("layout.json", layout_json());
      return 0;
    }

    if (sub == plot_cmd) {
      SimContext ctx(cfg);
      std::ostringstream scatter;
      bool first = true;
      for (PolicyMode mode : {PolicyMode::nominal_only, PolicyMode::governed}) {
        LongHorizonOptions o;
        o.n_agents = plot_agents;
        o.duration = plot_duration.value_or(cfg.long_horizon.duration);
        o.segment = cfg.long_horizon.segment;
        o.mode = mode;
        o.seed = flags.seed;
        o.workers = flags.workers;
        std::ostringstream part;
        write_scatter_csv(part, long_horizon_experiment(ctx, o));
        std::string text = part.str();
        if (!first) text = text.substr(text.find('\n', text.find('\n') + 1) + 1);
        scatter << text;
        first = false;
      }
      out.emit("scatter.csv", scatter.str());
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::config_error || e.kind() == ErrorKind::invalid_argument ? kExitConfig
                                                                                          : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
