#include <doctest.h>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "legtherm/agent_sim.hpp"
#include "legtherm/config_io.hpp"
#include "legtherm/experiments.hpp"
#include "legtherm/report_io.hpp"
#include "legtherm/scenario.hpp"

using namespace legtherm;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

ValidationError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e;
  }
  FAIL("expected ValidationError");
  return ValidationError({});
}

}  // namespace

TEST_CASE("config round trip") {
  const SimConfig def = default_sim_config();
  const std::string text = serialize_config(def);
  CHECK(parse_config(text) == def);
  CHECK(serialize_config(parse_config(text)) == text);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    SimConfig c = def;
    c.network.ambient_temp_c = 20.0 * u(rng);
    for (auto& n : c.network.nodes) {
      if (n.kind != NodeKind::ambient) n.capacitance *= u(rng);
    }
    for (auto& e : c.network.edges) {
      e.resistance *= u(rng);
      e.conv_base *= u(rng);
      e.conv_exponent *= u(rng);
    }
    c.electrical.per_motor[trial % 12] = {0.5 * u(rng), 0.3 * u(rng), u(rng), 0.01 * u(rng)};
    c.rewards.sigma_th = 0.35 * u(rng);
    c.reward_mode = trial % 2 ? ThermalWeightMode::literal : ThermalWeightMode::smooth;
    c.thermal.discretization = trial % 3 ? Discretization::exact : Discretization::euler;
    c.governor.yaw_relief_gain *= u(rng);
    c.gait.speed_gain[1] *= u(rng);
    c.control.default_pose[4] = 0.8 * u(rng);
    c.terrain.stairs.torque_factor = 1.6 * u(rng);
    c.long_horizon.payload = {2.0 * u(rng), 3.5 * u(rng) + 1.0};
    const SimConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("shipped config file equals the built-in defaults") {
  const SimConfig file = load_config(std::string(LEGTHERM_SOURCE_DIR) + "/config/default.json");
  CHECK(file == default_sim_config());
  CHECK(read_file(std::string(LEGTHERM_SOURCE_DIR) + "/config/default.json") == serialize_config(default_sim_config()));
}

TEST_CASE("partial configs keep defaults") {
  const SimConfig c = parse_config(R"({"rewards": {"t_max": 55.0}, "governor": {"yaw_relief_gain": 0.2}})");
  CHECK(c.rewards.t_max == 55.0);
  CHECK(c.governor.yaw_relief_gain == 0.2);
  CHECK(c.network == default_sim_config().network);
  CHECK(parse_config("{}") == default_sim_config());
}

TEST_CASE("config errors are collected") {
  SUBCASE("unknown keys") {
    const auto e = parse_error(R"({"rewards": {"t_maxx": 55.0}, "bogus": 1})");
    CHECK(e.issues().size() == 2);
    CHECK(std::string(e.what()).find("t_maxx") != std::string::npos);
  }
  SUBCASE("type errors and range errors together") {
    const auto e = parse_error(R"({"rewards": {"sigma_th": "hot"}, "control": {"substeps": 0}})");
    CHECK(e.issues().size() >= 2);
  }
  SUBCASE("network problems surface through the loader") {
    json j = json::parse(serialize_config(default_sim_config()));
    j["thermal_network"]["nodes"][2]["capacitance"] = 0.0;
    const auto e = parse_error(j.dump());
    CHECK(e.has(ErrorKind::non_positive_parameter));
  }
  SUBCASE("wrong format tag") {
    CHECK_THROWS_AS(parse_config(R"({"format": "something-else/9"})"), ValidationError);
  }
  SUBCASE("malformed text") {
    CHECK_THROWS_AS(parse_config("{ not json"), Error);
  }
  SUBCASE("missing file") {
    try {
      load_config("/nonexistent/legtherm.json");
      FAIL("expected config_error");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::config_error);
    }
  }
}

TEST_CASE("decimal formatting round-trips") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trace csv") {
  const SimContext ctx(default_sim_config());
  const Scenario sc = make_scenario(ctx.config(), ScenarioKind::randomized, 5, 2.0);
  const EpisodeRecord rec = run_episode(ctx, sc.setup, sc.profile, PolicyMode::governed);
  std::ostringstream os;
  write_trace_csv(os, rec);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == rec.size() + 2);
  CHECK(rows[0] == "# legtherm-trace/1");
  const auto header = split(rows[1], ',');
  CHECK(header == trace_columns());
  CHECK(header.size() == 2 + 14 + 9 + 2 + 14 + 14 + 24 + 2 + 5);
  for (std::size_t r = 2; r < rows.size(); ++r) CHECK(split(rows[r], ',').size() == header.size());
  const auto last = split(rows.back(), ',');
  CHECK(std::stod(last[2]) == rec.temps.back()[0]);
  CHECK(header[2] == "T_" + node_labels()[0]);
  CHECK(node_labels()[13] == "ambient");

  EpisodeOptions lean;
  lean.detailed = false;
  const EpisodeRecord slim = run_episode(ctx, sc.setup, sc.profile, PolicyMode::governed, lean);
  std::ostringstream dummy;
  CHECK_THROWS_AS(write_trace_csv(dummy, slim), Error);
}

TEST_CASE("reward sweep table") {
  std::ostringstream os;
  write_reward_sweep_csv(os, RewardWeights{}, 20.0, 80.0, 1.0);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == 62);
  CHECK(rows[0] == "temperature,thermal_weight_smooth,thermal_weight_literal,thermal_reward_smooth,thermal_reward_literal");
  const auto at60 = split(rows[41], ',');
  CHECK(at60[0] == "60");
  CHECK(std::stod(at60[1]) == 1.0);
  CHECK(std::stod(at60[3]) == doctest::Approx(-100.0));
  const auto at30 = split(rows[11], ',');
  CHECK(std::stod(at30[1]) == doctest::Approx(std::exp(-10.5)).epsilon(1e-12));
  CHECK(std::stod(at30[2]) == 1.0);
  CHECK_THROWS_AS(write_reward_sweep_csv(os, RewardWeights{}, 80.0, 20.0, 1.0), Error);
}

TEST_CASE("layout exports match the observation layouts") {
  std::ostringstream os;
  write_layout_csv(os);
  const auto rows = lines(os.str());
  std::size_t expected = 1;
  for (auto l : {ObsLayout::nominal, ObsLayout::residual}) expected += observation_layout(l).size();
  CHECK(rows.size() == expected);
  const json j = json::parse(layout_json());
  for (auto l : {ObsLayout::nominal, ObsLayout::residual}) {
    const auto& fields = j.at(std::string(to_string(l)));
    CHECK(fields.at("size").get<std::size_t>() == observation_size(l));
    const auto layout = observation_layout(l);
    REQUIRE(fields.at("fields").size() == layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
      CHECK(fields.at("fields")[i].at("field").get<std::string>() == layout[i].name);
      CHECK(fields.at("fields")[i].at("offset").get<std::size_t>() == layout[i].offset);
      CHECK(fields.at("fields")[i].at("length").get<std::size_t>() == layout[i].length);
    }
  }
}

TEST_CASE("summaries are deterministic json") {
  const SimContext ctx(default_sim_config());
  LongHorizonOptions o;
  o.n_agents = 6;
  o.duration = 10.0;
  o.seed = 4;
  const auto a = long_horizon_summary_json(long_horizon_experiment(ctx, o));
  o.workers = 3;
  const auto b = long_horizon_summary_json(long_horizon_experiment(ctx, o));
  CHECK(a == b);
  const json j = json::parse(a);
  CHECK(j.at("format") == "legtherm-summary/1");
  CHECK(j.at("agents").size() == 6);

  TerrainSuiteOptions t;
  t.n_trials = 3;
  t.initial_temps = {30.0};
  const json tj = json::parse(terrain_summary_json(terrain_trial_suite(ctx, t)));
  CHECK(tj.at("format") == "legtherm-summary/1");

  std::ostringstream scatter;
  write_scatter_csv(scatter, long_horizon_experiment(ctx, o));
  const auto sc_rows = lines(scatter.str());
  CHECK(sc_rows.size() == 8);
  CHECK(sc_rows[0].rfind("# legtherm-summary/1", 0) == 0);
}
