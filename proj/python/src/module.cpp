#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "legtherm/agent_sim.hpp"
#include "legtherm/config_io.hpp"
#include "legtherm/experiments.hpp"
#include "legtherm/report_io.hpp"
#include "legtherm/reward_engine.hpp"
#include "legtherm/thermal_core.hpp"
#include "legtherm/vec_env.hpp"

namespace py = pybind11;
using namespace legtherm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class T>
py::array_t<T> to_array(const std::vector<T>& v, std::size_t rows, std::size_t cols) {
  py::array_t<T> out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict batch_dict(const EnvBatch& b) {
  py::dict d;
  d["observations"] = to_array(b.observations, b.batch, b.obs_size);
  d["motor_temps"] = to_array(b.motor_temps, b.batch, kNumMotors);
  return d;
}

std::vector<std::string> reward_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kRewardTermCount; ++i) names.emplace_back(reward_term_name(i));
  return names;
}

py::list layout_table(ObsLayout layout) {
  py::list rows;
  for (const auto& f : observation_layout(layout)) {
    rows.append(py::make_tuple(std::string(f.name), f.offset, f.length));
  }
  return rows;
}

std::span<const double> flat(const Array& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

/// Same episode as `legtherm simulate`, returned as trace CSV text.
std::string simulate_trace(const SimConfig& cfg, const std::string& scenario, std::uint64_t seed, double duration,
                           const std::string& mode_name, std::optional<Array> actions) {
  const PolicyMode mode = policy_mode_from_string(mode_name);
  const Scenario sc = make_scenario(cfg, scenario_from_string(scenario), seed, duration);
  SimContext ctx(cfg);
  AgentSim sim(ctx, sc.setup, sc.profile, mode);
  const auto steps = static_cast<std::size_t>(std::llround(duration / sim.dt()));
  if (actions) {
    if (!is_external(mode)) throw Error(ErrorKind::invalid_argument, "actions need an external mode");
    if (actions->ndim() != 2 || static_cast<std::size_t>(actions->shape(1)) != kNumMotors ||
        static_cast<std::size_t>(actions->shape(0)) < steps) {
      throw_dimension_mismatch("actions", steps * kNumMotors, static_cast<std::size_t>(actions->size()));
    }
  }
  const std::vector<double> zero(kNumMotors, 0.0);
  EpisodeRecord rec;
  rec.dt = sim.dt();
  rec.reserve(steps + 1);
  rec.append(sim.last());
  for (std::size_t k = 0; k < steps; ++k) {
    if (!is_external(mode)) {
      rec.append(sim.step());
    } else if (actions) {
      rec.append(sim.step(std::span<const double>(actions->data(k, 0), kNumMotors)));
    } else {
      rec.append(sim.step(zero));
    }
  }
  rec.complete = true;
  std::ostringstream out;
  write_trace_csv(out, rec);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thermal-aware quadruped simulator core";
  m.attr("__version__") = LEGTHERM_VERSION;
  m.attr("NUM_MOTORS") = kNumMotors;
  m.attr("NUM_NODES") = kNumNodes;
  m.attr("NOMINAL_OBS_SIZE") = kNominalObsSize;
  m.attr("RESIDUAL_OBS_SIZE") = kResidualObsSize;

  static py::handle error = py::exception<Error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error)(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init(&default_sim_config))
      .def_static("from_json", &parse_config, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_config(path); }, py::arg("path"))
      .def("to_json", &serialize_config)
      .def("validate", [](const SimConfig& c) { validate(c); })
      .def(py::self == py::self);

  m.def("layout", [](const std::string& name) { return layout_table(name == "nominal" ? ObsLayout::nominal : ObsLayout::residual); },
        py::arg("name") = "residual", "Observation layout as (field, offset, length) rows.");
  m.def("layout_json", &layout_json);
  m.def("reward_names", &reward_names);
  m.def("trace_columns", &trace_columns);
  m.def("node_labels", &node_labels);

  m.def(
      "thermal_weight",
      [](double temp, const std::string& mode, const SimConfig& cfg) {
        return thermal_weight(temp, cfg.rewards, mode == "literal" ? ThermalWeightMode::literal : ThermalWeightMode::smooth);
      },
      py::arg("temp"), py::arg("mode") = "smooth", py::arg("config") = default_sim_config());
  m.def(
      "regularization_reward",
      [](const Array& a, const SimConfig& cfg) { return regularization_reward(flat(a), cfg.rewards); },
      py::arg("a_res"), py::arg("config") = default_sim_config());

  m.def(
      "discretize",
      [](const SimConfig& cfg, double v_xy, double dt, const std::string& method) {
        const auto net = build_network(cfg.network);
        const auto d = discretize(net, v_xy, dt, method == "euler" ? Discretization::euler : Discretization::exact);
        Array a({kNumNodes, kNumNodes}), b({kNumNodes, kNumNodes});
        for (std::size_t i = 0; i < kNumNodes; ++i) {
          for (std::size_t j = 0; j < kNumNodes; ++j) {
            a.mutable_at(i, j) = d.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            b.mutable_at(i, j) = d.B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          }
        }
        return py::make_tuple(a, b);
      },
      py::arg("config"), py::arg("v_xy"), py::arg("dt") = 0.02, py::arg("method") = "exact",
      "Discrete (A, B) of the configured network at a frozen speed.");
  m.def(
      "steady_state",
      [](const SimConfig& cfg, const Array& heat, double v_xy) {
        const auto ss = steady_state(build_network(cfg.network), HeatVector::from_span(flat(heat)), v_xy);
        return std::vector<double>(ss.temps.data(), ss.temps.data() + kNumNodes);
      },
      py::arg("config"), py::arg("heat"), py::arg("v_xy"));

  m.def("simulate_trace", &simulate_trace, py::arg("config"), py::arg("scenario") = "randomized", py::arg("seed") = 0,
        py::arg("duration") = 20.0, py::arg("mode") = "nominal_only", py::arg("actions") = py::none());

  m.def(
      "long_horizon",
      [](const SimConfig& cfg, std::size_t agents, double duration, const std::string& mode, std::uint64_t seed,
         std::size_t workers) {
        const SimContext ctx(cfg);
        LongHorizonOptions o;
        o.n_agents = agents;
        o.duration = duration;
        o.mode = policy_mode_from_string(mode);
        o.seed = seed;
        o.workers = workers;
        LongHorizonResult r;
        {
          py::gil_scoped_release release;
          r = long_horizon_experiment(ctx, o);
        }
        return long_horizon_summary_json(r);
      },
      py::arg("config"), py::arg("agents"), py::arg("duration") = 800.0, py::arg("mode") = "nominal_only",
      py::arg("seed") = 0, py::arg("workers") = 1, "Runs the batch experiment and returns its summary JSON.");

  py::class_<VecEnv>(m, "VecEnv")
      .def(py::init([](const SimConfig& cfg, std::size_t batch, const std::string& layout, const std::string& scenario,
                       const std::string& action_mode) {
             EnvOptions o;
             o.batch = batch;
             o.layout = layout == "nominal" ? ObsLayout::nominal : ObsLayout::residual;
             o.scenario = scenario_from_string(scenario);
             o.action_mode = policy_mode_from_string(action_mode);
             return std::make_unique<VecEnv>(cfg, o);
           }),
           py::arg("config"), py::arg("batch") = 1, py::arg("layout") = "residual", py::arg("scenario") = "randomized",
           py::arg("action_mode") = "external_residual")
      .def_property_readonly("batch", &VecEnv::batch)
      .def_property_readonly("obs_size", &VecEnv::obs_size)
      .def("reset",
           [](VecEnv& env, const std::vector<std::uint64_t>& seeds) { return batch_dict(env.reset(seeds)); },
           py::arg("seeds"))
      .def(
          "step",
          [](VecEnv& env, const Array& actions) {
            const EnvStepResult r = env.step(flat(actions));
            py::dict d = batch_dict(r);
            d["rewards"] = to_array(r.rewards, r.batch, kRewardTermCount);
            d["reward_total"] = to_array(r.totals, r.batch, 1).attr("reshape")(r.batch);
            d["terminated"] = to_array(r.terminated, r.batch, 1).attr("reshape")(r.batch).attr("astype")("bool");
            d["truncated"] = to_array(r.truncated, r.batch, 1).attr("reshape")(r.batch).attr("astype")("bool");
            d["reward_names"] = reward_names();
            return d;
          },
          py::arg("actions"));
}
