#include "legtherm/report_io.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

namespace legtherm {
namespace {

using json = nlohmann::ordered_json;

json histogram_json(const OutcomeHistogram& h) {
  json j = json::object();
  for (std::size_t i = 0; i < kOutcomeCount; ++i) j[std::string(to_string(static_cast<Outcome>(i)))] = h[i];
  return j;
}

json agent_json(const AgentMetrics& m) {
  json j = json::object();
  j["index"] = m.index;
  j["seed"] = m.seed;
  j["payload"] = m.payload;
  j["ambient"] = m.ambient;
  j["mean_tracking_error"] = m.mean_tracking_error;
  j["max_motor_temp"] = m.max_motor_temp;
  j["overheat_time"] = m.overheat_time ? json(*m.overheat_time) : json(nullptr);
  j["outcome"] = std::string(to_string(m.outcome));
  return j;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> node_labels() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kNumMotors; ++i) out.push_back(joint_label(i));
  out.emplace_back("computer");
  out.emplace_back("ambient");
  return out;
}

std::vector<std::string> trace_columns() {
  std::vector<std::string> c{"step", "time"};
  const auto nodes = node_labels();
  for (const auto& n : nodes) c.push_back("T_" + n);
  for (const char* s : {"cmd_vx", "cmd_vy", "cmd_yaw", "mod_vx", "mod_vy", "mod_yaw", "ach_vx", "ach_vy", "ach_yaw",
                        "tracking_error", "governor_weight"}) {
    c.emplace_back(s);
  }
  for (std::size_t t = 0; t < kRewardTermCount; ++t) c.push_back("r_" + std::string(reward_term_name(t)));
  c.emplace_back("reward_total");
  for (const auto& n : nodes) c.push_back("Q_" + n);
  for (std::size_t j = 0; j < kNumMotors; ++j) c.push_back("a_nom_" + joint_label(j));
  for (std::size_t j = 0; j < kNumMotors; ++j) c.push_back("a_res_" + joint_label(j));
  for (const char* s : {"clip_events", "saturation_events", "x", "y", "heading", "distance", "lateral_deviation"}) {
    c.emplace_back(s);
  }
  return c;
}

void write_trace_csv(std::ostream& out, const EpisodeRecord& rec) {
  if (!rec.detailed || !rec.consistent()) {
    throw Error(ErrorKind::incomplete_record, "trace export needs a complete detailed record");
  }
  out << "# " << kTraceFormat << '\n';
  write_row(out, trace_columns());
  std::vector<std::string> row;
  for (std::size_t r = 0; r < rec.size(); ++r) {
    row.clear();
    row.push_back(std::to_string(r));
    row.push_back(format_double(rec.time[r]));
    for (double t : rec.temps[r]) row.push_back(format_double(t));
    for (const Command* c : {&rec.command[r], &rec.modulated_command[r]}) {
      row.push_back(format_double(c->vx));
      row.push_back(format_double(c->vy));
      row.push_back(format_double(c->yaw));
    }
    for (double v : rec.achieved[r]) row.push_back(format_double(v));
    row.push_back(format_double(rec.tracking_error[r]));
    row.push_back(format_double(rec.governor_weight[r]));
    for (double v : rec.rewards[r].terms) row.push_back(format_double(v));
    row.push_back(format_double(rec.rewards[r].total));
    for (double q : rec.heat[r]) row.push_back(format_double(q));
    for (double a : rec.a_nom[r]) row.push_back(format_double(a));
    for (double a : rec.a_res[r]) row.push_back(format_double(a));
    row.push_back(std::to_string(rec.clip_events[r]));
    row.push_back(std::to_string(rec.saturation_events[r]));
    for (double p : rec.pose[r]) row.push_back(format_double(p));
    row.push_back(format_double(rec.distance[r]));
    row.push_back(format_double(rec.lateral_deviation[r]));
    write_row(out, row);
  }
}

std::string long_horizon_summary_json(const LongHorizonResult& res) {
  json j = json::object();
  j["format"] = std::string(kSummaryFormat);
  j["kind"] = "long-horizon";
  j["mode"] = std::string(to_string(res.options.mode));
  j["seed"] = res.options.seed;
  j["n_agents"] = res.options.n_agents;
  j["duration"] = res.options.duration;
  j["segment"] = res.options.segment;
  j["overheat_fraction"] = res.overheat_fraction;
  j["mean_tracking_error"] = res.mean_tracking_error;
  j["mean_max_motor_temp"] = res.mean_max_temp;
  j["outcomes"] = histogram_json(res.histogram);
  json agents = json::array();
  for (const auto& m : res.agents) agents.push_back(agent_json(m));
  j["agents"] = std::move(agents);
  return j.dump(2) + "\n";
}

std::string terrain_summary_json(const TerrainSuiteResult& res) {
  json j = json::object();
  j["format"] = std::string(kSummaryFormat);
  j["kind"] = "terrain-suite";
  j["terrain"] = std::string(to_string(res.options.terrain));
  j["mode"] = std::string(to_string(res.options.mode));
  j["seed"] = res.options.seed;
  j["n_trials"] = res.options.n_trials;
  json levels = json::array();
  for (const auto& l : res.levels) {
    json lj = json::object();
    lj["initial_temp"] = l.initial_temp;
    lj["outcomes"] = histogram_json(l.histogram);
    lj["mean_peak_motor_temp"] = l.mean_peak_temp;
    json tj = json::object();
    tj["successful"] = l.traversal.count;
    if (l.traversal.count) {
      tj["p05"] = l.traversal.p05;
      tj["p50"] = l.traversal.p50;
      tj["p95"] = l.traversal.p95;
      tj["mean"] = l.traversal.mean;
    }
    lj["traversal_time"] = std::move(tj);
    json trials = json::array();
    for (std::size_t i = 0; i < l.trials.size(); ++i) {
      json a = agent_json(l.trials[i]);
      a["traversal_time"] = l.traversal_times[i] ? json(*l.traversal_times[i]) : json(nullptr);
      trials.push_back(std::move(a));
    }
    lj["trials"] = std::move(trials);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  return j.dump(2) + "\n";
}

void write_scatter_csv(std::ostream& out, const LongHorizonResult& res) {
  out << "# " << kSummaryFormat << " scatter\n";
  out << "index,seed,mode,payload,ambient,mean_tracking_error,max_motor_temp,outcome\n";
  for (const auto& m : res.agents) {
    write_row(out, {std::to_string(m.index), std::to_string(m.seed), std::string(to_string(res.options.mode)),
                    format_double(m.payload), format_double(m.ambient), format_double(m.mean_tracking_error),
                    format_double(m.max_motor_temp), std::string(to_string(m.outcome))});
  }
}

void write_layout_csv(std::ostream& out) {
  out << "layout,field,offset,length\n";
  for (ObsLayout l : {ObsLayout::nominal, ObsLayout::residual}) {
    for (const ObsField& f : observation_layout(l)) {
      out << to_string(l) << ',' << f.name << ',' << f.offset << ',' << f.length << '\n';
    }
  }
}

std::string layout_json() {
  json j = json::object();
  for (ObsLayout l : {ObsLayout::nominal, ObsLayout::residual}) {
    json fields = json::array();
    for (const ObsField& f : observation_layout(l)) {
      fields.push_back({{"field", std::string(f.name)}, {"offset", f.offset}, {"length", f.length}});
    }
    j[std::string(to_string(l))] = {{"size", observation_size(l)}, {"fields", std::move(fields)}};
  }
  return j.dump(2) + "\n";
}

void write_reward_sweep_csv(std::ostream& out, const RewardWeights& w, double t_min, double t_max, double step,
                            double rate) {
  if (!(step > 0.0) || !(t_max >= t_min)) {
    throw Error(ErrorKind::invalid_argument, "reward sweep needs t_max >= t_min and step > 0");
  }
  if (!std::isfinite(rate)) throw Error(ErrorKind::invalid_argument, "reward sweep rate must be finite");
  out << "temperature,thermal_weight_smooth,thermal_weight_literal,thermal_reward_smooth,thermal_reward_literal\n";
  const auto n = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t_min + static_cast<double>(i) * step;
    ThermalRewardInput one;
    one.temps.fill(t);
    one.temp_rates[0] = rate;
    out << format_double(t) << ',' << format_double(thermal_weight(t, w, ThermalWeightMode::smooth)) << ','
        << format_double(thermal_weight(t, w, ThermalWeightMode::literal)) << ','
        << format_double(thermal_reward(one, w, ThermalWeightMode::smooth)) << ','
        << format_double(thermal_reward(one, w, ThermalWeightMode::literal)) << '\n';
  }
}

}  // namespace legtherm
