#include "legtherm/config_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace legtherm {
namespace {

using nlohmann::ordered_json;
using json = ordered_json;

template <class E>
E enum_from(std::string_view s, std::initializer_list<E> values, bool& ok) {
  for (E e : values) {
    if (to_string(e) == s) return e;
  }
  ok = false;
  return *values.begin();
}

class Writer {
 public:
  explicit Writer(json& out) : out_(out) { out_ = json::object(); }

  void operator()(const char* k, double& v) { out_[k] = v; }
  void operator()(const char* k, int& v) { out_[k] = v; }
  void operator()(const char* k, bool& v) { out_[k] = v; }
  void operator()(const char* k, std::string& v) { out_[k] = v; }
  template <std::size_t N>
  void operator()(const char* k, std::array<double, N>& v) {
    out_[k] = json(std::vector<double>(v.begin(), v.end()));
  }
  void operator()(const char* k, Range& v) { out_[k] = json::array({v.lo, v.hi}); }
  void operator()(const char* k, NodeKind& v) { out_[k] = std::string(to_string(v)); }
  void operator()(const char* k, Discretization& v) { out_[k] = std::string(to_string(v)); }
  void operator()(const char* k, ThermalWeightMode& v) { out_[k] = std::string(to_string(v)); }
  template <class S>
  void operator()(const char* k, S& v);
  template <class S>
  void operator()(const char* k, std::vector<S>& v);
  void operator()(const char* k, std::map<int, MotorElectricalParams>& v);

 private:
  json& out_;
};

class Reader {
 public:
  Reader(const json& in, std::string path, std::vector<Issue>& issues)
      : in_(in), path_(std::move(path)), issues_(issues) {
    if (!in_.is_object()) issue(path_ + " must be an object");
  }

  void operator()(const char* k, double& v) {
    if (const json* j = find(k)) {
      if (j->is_number()) v = j->get<double>();
      else issue(at(k) + " must be a number");
    }
  }
  void operator()(const char* k, int& v) {
    if (const json* j = find(k)) {
      if (j->is_number_integer()) v = j->get<int>();
      else issue(at(k) + " must be an integer");
    }
  }
  void operator()(const char* k, bool& v) {
    if (const json* j = find(k)) {
      if (j->is_boolean()) v = j->get<bool>();
      else issue(at(k) + " must be true or false");
    }
  }
  void operator()(const char* k, std::string& v) {
    if (const json* j = find(k)) {
      if (j->is_string()) v = j->get<std::string>();
      else issue(at(k) + " must be a string");
    }
  }
  template <std::size_t N>
  void operator()(const char* k, std::array<double, N>& v) {
    if (const json* j = find(k)) {
      if (!numbers(*j, N)) {
        issue(at(k) + " must be an array of " + std::to_string(N) + " numbers");
        return;
      }
      for (std::size_t i = 0; i < N; ++i) v[i] = (*j)[i].template get<double>();
    }
  }
  void operator()(const char* k, Range& v) {
    if (const json* j = find(k)) {
      if (!numbers(*j, 2)) {
        issue(at(k) + " must be [lo, hi]");
        return;
      }
      v = {(*j)[0].get<double>(), (*j)[1].get<double>()};
    }
  }
  void operator()(const char* k, NodeKind& v) {
    read_enum(k, v, {NodeKind::motor, NodeKind::computer, NodeKind::ambient});
  }
  void operator()(const char* k, Discretization& v) {
    read_enum(k, v, {Discretization::exact, Discretization::euler});
  }
  void operator()(const char* k, ThermalWeightMode& v) {
    read_enum(k, v, {ThermalWeightMode::smooth, ThermalWeightMode::literal});
  }
  template <class S>
  void operator()(const char* k, S& v);
  template <class S>
  void operator()(const char* k, std::vector<S>& v);
  void operator()(const char* k, std::map<int, MotorElectricalParams>& v);

  /// Reports keys present in the input that were never visited.
  void finish() {
    if (!in_.is_object()) return;
    for (const auto& [key, _] : in_.items()) {
      if (!seen_.count(key)) issue(at(key.c_str()) + " is not a recognized key");
    }
  }

 private:
  const json* find(const char* k) {
    seen_.insert(k);
    if (!in_.is_object()) return nullptr;
    auto it = in_.find(k);
    return it == in_.end() ? nullptr : &*it;
  }
  static bool numbers(const json& j, std::size_t n) {
    if (!j.is_array() || j.size() != n) return false;
    for (const auto& e : j) {
      if (!e.is_number()) return false;
    }
    return true;
  }
  template <class E>
  void read_enum(const char* k, E& v, std::initializer_list<E> values) {
    if (const json* j = find(k)) {
      bool ok = j->is_string();
      if (ok) v = enum_from(j->get<std::string>(), values, ok);
      if (!ok) {
        std::string allowed;
        for (E e : values) allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
        issue(at(k) + " must be one of: " + allowed);
      }
    }
  }
  std::string at(const char* k) const { return path_.empty() ? std::string(k) : path_ + "." + k; }
  void issue(std::string msg) { issues_.push_back({ErrorKind::config_error, std::move(msg)}); }

  const json& in_;
  std::string path_;
  std::vector<Issue>& issues_;
  std::set<std::string> seen_;
};

template <class V>
void fields(ThermalNode& n, V& v) {
  v("id", n.id);
  v("kind", n.kind);
  v("label", n.label);
  v("capacitance", n.capacitance);
}

template <class V>
void fields(ThermalEdge& e, V& v) {
  v("i", e.i);
  v("j", e.j);
  v("resistance", e.resistance);
  v("convective", e.convective);
  v("conv_base", e.conv_base);
  v("conv_coeff", e.conv_coeff);
  v("conv_exponent", e.conv_exponent);
}

template <class V>
void fields(NetworkConfig& n, V& v) {
  v("ambient_temp_c", n.ambient_temp_c);
  v("nodes", n.nodes);
  v("edges", n.edges);
}

template <class V>
void fields(MotorElectricalParams& p, V& v) {
  v("torque_constant", p.torque_constant);
  v("winding_resistance", p.winding_resistance);
  v("driver_power", p.driver_power);
  v("friction_coeff", p.friction_coeff);
}

template <class V>
void fields(ElectricalConfig& e, V& v) {
  v("defaults", e.defaults);
  v("per_motor", e.per_motor);
  v("computer_power", e.computer_power);
}

template <class V>
void fields(ThermalOptions& t, V& v) {
  v("bucket_width", t.bucket_width);
  v("discretization", t.discretization);
  v("heat_enabled", t.heat_enabled);
}

template <class V>
void fields(RewardWeights& w, V& v) {
  v("lin_track", w.lin_track);
  v("ang_track", w.ang_track);
  v("lin_vel_z", w.lin_vel_z);
  v("ang_vel_xy", w.ang_vel_xy);
  v("orientation", w.orientation);
  v("joint_accel", w.joint_accel);
  v("termination", w.termination);
  v("body_height", w.body_height);
  v("foot_clearance", w.foot_clearance);
  v("action_rate", w.action_rate);
  v("smoothness", w.smoothness);
  v("sigma_track", w.sigma_track);
  v("h_target", w.h_target);
  v("pz_target", w.pz_target);
  v("t_max", w.t_max);
  v("sigma_th", w.sigma_th);
  v("w_th", w.w_th);
  v("w_reg", w.w_reg);
}

template <class V>
void fields(PdGains& g, V& v) {
  v("kp", g.kp);
  v("kd", g.kd);
  v("torque_limit", g.torque_limit);
}

template <class V>
void fields(ControlConfig& c, V& v) {
  v("gains", c.gains);
  v("limits_lower", c.limits.lower);
  v("limits_upper", c.limits.upper);
  v("default_pose", c.default_pose);
  v("action_scale", c.action_scale);
  v("action_clip", c.action_clip);
  v("policy_dt", c.policy_dt);
  v("substeps", c.substeps);
}

template <class V>
void fields(GaitProxyParams& g, V& v) {
  v("stride_frequency", g.stride_frequency);
  v("base_load", g.base_load);
  v("speed_gain", g.speed_gain);
  v("yaw_gain", g.yaw_gain);
  v("payload_gain", g.payload_gain);
  v("force_gain", g.force_gain);
  v("swing_amplitude", g.swing_amplitude);
  v("crouch_per_speed", g.crouch_per_speed);
  v("stance_modulation", g.stance_modulation);
  v("foot_clearance", g.foot_clearance);
  v("standing_height", g.standing_height);
  v("height_drop_per_speed", g.height_drop_per_speed);
  v("moving_threshold", g.moving_threshold);
}

template <class V>
void fields(GovernorParams& g, V& v) {
  v("max_command_scale_reduction", g.max_command_scale_reduction);
  v("max_amplitude_reduction", g.max_amplitude_reduction);
  v("yaw_relief_gain", g.yaw_relief_gain);
  v("steer_action_gain", g.steer_action_gain);
}

template <class V>
void fields(PlantParams& p, V& v) {
  v("velocity_lag", p.velocity_lag);
  v("joint_inertia", p.joint_inertia);
}

template <class V>
void fields(RandomizationRanges& r, V& v) {
  v("payload", r.payload);
  v("com_shift", r.com_shift);
  v("external_force", r.external_force);
  v("ambient", r.ambient);
  v("initial_temp_offset", r.initial_temp_offset);
}

template <class V>
void fields(CommandRanges& r, V& v) {
  v("vx", r.vx);
  v("vy", r.vy);
  v("yaw", r.yaw);
}

template <class V>
void fields(LongHorizonConfig& l, V& v) {
  v("duration", l.duration);
  v("segment", l.segment);
  v("initial_temp", l.initial_temp);
  v("payload", l.payload);
}

template <class V>
void fields(TerrainProfile& t, V& v) {
  v("rise", t.rise);
  v("run", t.run);
  v("slope_deg", t.slope_deg);
  v("torque_factor", t.torque_factor);
}

template <class V>
void fields(TerrainConfig& t, V& v) {
  v("stairs", t.stairs);
  v("slope", t.slope);
  v("length", t.length);
  v("command_speed", t.command_speed);
  v("payload", t.payload);
  v("max_time", t.max_time);
}

template <class V>
void fields(OutcomeThresholds& o, V& v) {
  v("t_max", o.t_max);
  v("drift_distance", o.drift_distance);
  v("stuck_window", o.stuck_window);
  v("stuck_displacement", o.stuck_displacement);
  v("stuck_command_speed", o.stuck_command_speed);
}

template <class V>
void fields(EnvConfig& e, V& v) {
  v("termination_temp", e.termination_temp);
  v("episode_duration", e.episode_duration);
}

struct RewardSection {
  RewardWeights& w;
  ThermalWeightMode& mode;
};

template <class V>
void fields(RewardSection& r, V& v) {
  fields(r.w, v);
  v("thermal_weight_mode", r.mode);
}

template <class V>
void fields(SimConfig& c, V& v) {
  v("thermal_network", c.network);
  v("electrical", c.electrical);
  v("thermal", c.thermal);
  RewardSection rs{c.rewards, c.reward_mode};
  v("rewards", rs);
  v("control", c.control);
  v("gait", c.gait);
  v("governor", c.governor);
  v("plant", c.plant);
  v("randomization", c.randomization);
  v("commands", c.commands);
  v("long_horizon", c.long_horizon);
  v("terrain", c.terrain);
  v("outcome", c.outcome);
  v("env", c.env);
}

template <class S>
void Writer::operator()(const char* k, S& v) {
  json child;
  Writer w(child);
  fields(v, w);
  out_[k] = std::move(child);
}

template <class S>
void Writer::operator()(const char* k, std::vector<S>& v) {
  json arr = json::array();
  for (auto& item : v) {
    json child;
    Writer w(child);
    fields(item, w);
    arr.push_back(std::move(child));
  }
  out_[k] = std::move(arr);
}

void Writer::operator()(const char* k, std::map<int, MotorElectricalParams>& v) {
  json obj = json::object();
  for (auto& [id, p] : v) {
    json child;
    Writer w(child);
    fields(p, w);
    obj[std::to_string(id)] = std::move(child);
  }
  out_[k] = std::move(obj);
}

template <class S>
void Reader::operator()(const char* k, S& v) {
  if (const json* j = find(k)) {
    Reader r(*j, at(k), issues_);
    fields(v, r);
    r.finish();
  }
}

template <class S>
void Reader::operator()(const char* k, std::vector<S>& v) {
  if (const json* j = find(k)) {
    if (!j->is_array()) {
      issue(at(k) + " must be an array");
      return;
    }
    v.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      S item{};
      Reader r((*j)[i], at(k) + "[" + std::to_string(i) + "]", issues_);
      fields(item, r);
      r.finish();
      v.push_back(std::move(item));
    }
  }
}

void Reader::operator()(const char* k, std::map<int, MotorElectricalParams>& v) {
  if (const json* j = find(k)) {
    if (!j->is_object()) {
      issue(at(k) + " must be an object keyed by motor id");
      return;
    }
    v.clear();
    const MotorElectricalParams base;
    for (const auto& [key, value] : j->items()) {
      int id = -1;
      try {
        std::size_t used = 0;
        id = std::stoi(key, &used);
        if (used != key.size()) id = -1;
      } catch (const std::exception&) {
        id = -1;
      }
      if (id < 0) {
        issue(at(k) + "." + key + " is not a motor id");
        continue;
      }
      MotorElectricalParams p = base;
      Reader r(value, at(k) + "." + key, issues_);
      fields(p, r);
      r.finish();
      v[id] = p;
    }
  }
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({{ErrorKind::config_error, std::string("malformed JSON: ") + e.what()}});
  }
  std::vector<Issue> issues;
  SimConfig cfg;
  Reader r(root, "", issues);
  std::string format(kConfigFormat);
  r("format", format);
  if (format != kConfigFormat) {
    issues.push_back({ErrorKind::config_error, "unsupported format '" + format + "'"});
  }
  fields(cfg, r);
  r.finish();
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string serialize_config(const SimConfig& cfg) {
  SimConfig copy = cfg;
  json root = json::object();
  root["format"] = std::string(kConfigFormat);
  json body;
  Writer w(body);
  fields(copy, w);
  for (auto& [k, v] : body.items()) root[k] = v;
  return root.dump(2) + "\n";
}

}  // namespace legtherm
