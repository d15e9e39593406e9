#include "legtherm/thermal_core.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace legtherm {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::motor: return "motor";
    case NodeKind::computer: return "computer";
    case NodeKind::ambient: return "ambient";
  }
  return "?";
}

std::string_view to_string(Discretization d) {
  return d == Discretization::exact ? "exact" : "euler";
}

NetworkConfig default_network_config() {
  NetworkConfig cfg;
  cfg.ambient_temp_c = 20.0;

  // Per joint type: capacitance (J/K) and rest convection resistance (K/W).
  constexpr std::array<double, 3> motor_capacitance{300.0, 250.0, 200.0};
  constexpr std::array<double, 3> motor_conv_base{4.0, 4.5, 5.0};

  for (std::size_t m = 0; m < kNumMotors; ++m) {
    const auto type = static_cast<std::size_t>(joint_type(m));
    cfg.nodes.push_back({static_cast<int>(m), NodeKind::motor, joint_label(m),
                         motor_capacitance[type]});
  }
  cfg.nodes.push_back({static_cast<int>(kComputerNode), NodeKind::computer, "computer", 500.0});
  cfg.nodes.push_back({static_cast<int>(kAmbientNode), NodeKind::ambient, "ambient", 0.0});

  const int amb = static_cast<int>(kAmbientNode);
  const int cpu = static_cast<int>(kComputerNode);
  for (std::size_t m = 0; m < kNumMotors; ++m) {
    const auto type = static_cast<std::size_t>(joint_type(m));
    ThermalEdge e;
    e.i = static_cast<int>(m);
    e.j = amb;
    e.convective = true;
    e.conv_base = motor_conv_base[type];
    e.conv_coeff = 0.5;
    e.conv_exponent = 0.8;
    cfg.edges.push_back(e);
  }
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const int haa = static_cast<int>(joint_index(leg, JointType::haa));
    const int hfe = static_cast<int>(joint_index(leg, JointType::hfe));
    const int kfe = static_cast<int>(joint_index(leg, JointType::kfe));
    cfg.edges.push_back({haa, hfe, 8.0});
    cfg.edges.push_back({hfe, kfe, 10.0});
    cfg.edges.push_back({haa, cpu, 12.0});
  }
  ThermalEdge cpu_amb;
  cpu_amb.i = cpu;
  cpu_amb.j = amb;
  cpu_amb.convective = true;
  cpu_amb.conv_base = 2.0;
  cpu_amb.conv_coeff = 0.3;
  cpu_amb.conv_exponent = 0.8;
  cfg.edges.push_back(cpu_amb);
  return cfg;
}

namespace {

NodeKind expected_kind(std::size_t id) {
  if (id < kNumMotors) return NodeKind::motor;
  return id == kComputerNode ? NodeKind::computer : NodeKind::ambient;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ThermalNetwork build_network(const NetworkConfig& config, const BuildOptions& options) {
  std::vector<Issue> issues;
  auto report = [&issues](ErrorKind kind, std::string msg) {
    issues.push_back({kind, std::move(msg)});
  };

  if (!std::isfinite(config.ambient_temp_c)) {
    report(ErrorKind::config_error, "ambient_temp_c must be finite");
  }

  std::array<const ThermalNode*, kNumNodes> by_id{};
  for (const auto& node : config.nodes) {
    if (node.id < 0 || node.id >= static_cast<int>(kNumNodes)) {
      report(ErrorKind::invalid_node, "node id " + std::to_string(node.id) + " out of range 0..13");
      continue;
    }
    if (by_id[node.id] != nullptr) {
      report(ErrorKind::invalid_node, "node id " + std::to_string(node.id) + " listed twice");
      continue;
    }
    by_id[node.id] = &node;
  }
  for (std::size_t id = 0; id < kNumNodes; ++id) {
    const auto want = expected_kind(id);
    const ThermalNode* node = by_id[id];
    if (node == nullptr || node->kind != want) {
      report(ErrorKind::missing_node, "no " + std::string(to_string(want)) + " node with id " +
                                          std::to_string(id));
      continue;
    }
    if (want != NodeKind::ambient && !finite_positive(node->capacitance)) {
      report(ErrorKind::non_positive_parameter,
             "capacitance of node " + std::to_string(id) + " (" + node->label + ") must be > 0");
    }
  }

  std::set<std::pair<int, int>> seen;
  std::vector<std::vector<std::size_t>> adjacency(kNumNodes);
  for (std::size_t k = 0; k < config.edges.size(); ++k) {
    const auto& e = config.edges[k];
    const std::string tag = "edge #" + std::to_string(k) + " (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ")";
    const int n = static_cast<int>(kNumNodes);
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      report(ErrorKind::invalid_edge, tag + " references an unknown node");
      continue;
    }
    if (e.i == e.j) {
      report(ErrorKind::invalid_edge, tag + " is a self-loop");
      continue;
    }
    if (!seen.insert({std::min(e.i, e.j), std::max(e.i, e.j)}).second) {
      report(ErrorKind::duplicate_edge, tag + " duplicates an earlier edge");
      continue;
    }
    if (e.convective) {
      const bool touches_ambient =
          e.i == static_cast<int>(kAmbientNode) || e.j == static_cast<int>(kAmbientNode);
      if (!touches_ambient) {
        report(ErrorKind::invalid_edge, tag + " is convective but does not reach ambient");
      }
      if (!finite_positive(e.conv_base)) {
        report(ErrorKind::non_positive_parameter, tag + " conv_base must be > 0");
      }
      if (!std::isfinite(e.conv_coeff) || e.conv_coeff < 0.0) {
        report(ErrorKind::non_positive_parameter, tag + " conv_coeff must be >= 0");
      }
      if (!std::isfinite(e.conv_exponent) || e.conv_exponent < 0.0) {
        report(ErrorKind::non_positive_parameter, tag + " conv_exponent must be >= 0");
      }
    } else if (!finite_positive(e.resistance)) {
      report(ErrorKind::non_positive_parameter, tag + " resistance must be > 0");
    }
    adjacency[e.i].push_back(static_cast<std::size_t>(e.j));
    adjacency[e.j].push_back(static_cast<std::size_t>(e.i));
  }

  if (options.require_ambient_path) {
    std::vector<bool> reached(kNumNodes, false);
    std::vector<std::size_t> frontier{kAmbientNode};
    reached[kAmbientNode] = true;
    while (!frontier.empty()) {
      const auto cur = frontier.back();
      frontier.pop_back();
      for (auto nb : adjacency[cur]) {
        if (!reached[nb]) {
          reached[nb] = true;
          frontier.push_back(nb);
        }
      }
    }
    for (std::size_t id = 0; id < kNumNodes; ++id) {
      if (!reached[id]) {
        report(ErrorKind::disconnected_graph,
               "node " + std::to_string(id) + " has no thermal path to ambient");
      }
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));

  ThermalNetwork net;
  net.ambient_temp_ = config.ambient_temp_c;
  for (std::size_t id = 0; id < kNumNodes; ++id) net.nodes_.push_back(*by_id[id]);
  net.edges_ = config.edges;
  net.neighbors_ = std::move(adjacency);
  return net;
}

double convection_resistance(const ThermalEdge& edge, double v_xy) {
  if (!edge.convective) {
    throw Error(ErrorKind::not_convective, "edge (" + std::to_string(edge.i) + "," +
                                               std::to_string(edge.j) + ") is a conduction edge");
  }
  const double v = std::max(v_xy, 0.0);
  return edge.conv_base / (1.0 + edge.conv_coeff * std::pow(v, edge.conv_exponent));
}

double edge_resistance(const ThermalEdge& edge, double v_xy) {
  return edge.convective ? convection_resistance(edge, v_xy) : edge.resistance;
}

NodeMatrix ThermalNetwork::system_matrix(double v_xy) const {
  NodeMatrix ac = NodeMatrix::Zero();
  for (const auto& e : edges_) {
    const double g = 1.0 / edge_resistance(e, v_xy);
    for (const auto [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      if (a == static_cast<int>(kAmbientNode)) continue;
      const double c = nodes_[a].capacitance;
      ac(a, a) -= g / c;
      ac(a, b) += g / c;
    }
  }
  return ac;
}

NodeVector ThermalNetwork::input_gain() const {
  NodeVector gain = NodeVector::Zero();
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    if (i != kAmbientNode) gain[i] = 1.0 / nodes_[i].capacitance;
  }
  return gain;
}

TemperatureState TemperatureState::uniform(double node_temp, double ambient_temp) {
  TemperatureState s;
  s.temps.setConstant(node_temp);
  s.temps[kAmbientNode] = ambient_temp;
  return s;
}

TemperatureState TemperatureState::from_motor_temps(std::span<const double> motor_temps,
                                                    double computer_temp, double ambient_temp) {
  if (motor_temps.size() != kNumMotors) {
    throw_dimension_mismatch("motor temperatures", kNumMotors, motor_temps.size());
  }
  TemperatureState s;
  for (std::size_t i = 0; i < kNumMotors; ++i) s.temps[i] = motor_temps[i];
  s.temps[kComputerNode] = computer_temp;
  s.temps[kAmbientNode] = ambient_temp;
  return s;
}

TemperatureState TemperatureState::from_span(std::span<const double> values) {
  if (values.size() != kNumNodes) throw_dimension_mismatch("temperature state", kNumNodes, values.size());
  TemperatureState s;
  for (std::size_t i = 0; i < kNumNodes; ++i) s.temps[i] = values[i];
  return s;
}

double TemperatureState::max_motor() const { return temps.head<kNumMotors>().maxCoeff(); }

HeatVector HeatVector::from_span(std::span<const double> values) {
  if (values.size() != kNumNodes) throw_dimension_mismatch("heat vector", kNumNodes, values.size());
  HeatVector h;
  for (std::size_t i = 0; i < kNumNodes; ++i) h.q[i] = values[i];
  return h;
}

namespace {
void require_zero_ambient_input(const HeatVector& u) {
  if (u.q[kAmbientNode] != 0.0) {
    throw Error(ErrorKind::invalid_argument, "heat input at the ambient node must be 0");
  }
}
}  // namespace

NodeVector continuous_derivative(const ThermalNetwork& net, const TemperatureState& state,
                                 const HeatVector& heat_in, double v_xy) {
  require_zero_ambient_input(heat_in);
  NodeVector power = heat_in.q;
  for (const auto& e : net.edges()) {
    const double flow = (state.temps[e.i] - state.temps[e.j]) / edge_resistance(e, v_xy);
    power[e.i] -= flow;
    power[e.j] += flow;
  }
  NodeVector deriv = NodeVector::Zero();
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    if (i != kAmbientNode) deriv[i] = power[i] / net.capacitance(i);
  }
  return deriv;
}

DiscreteThermalModel discretize(const ThermalNetwork& net, double v_xy, double dt,
                                Discretization method) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::invalid_argument, "dt must be positive and finite");
  }
  if (!(v_xy >= 0.0) || !std::isfinite(v_xy)) {
    throw Error(ErrorKind::invalid_argument, "v_xy must be non-negative and finite");
  }
  const NodeMatrix ac = net.system_matrix(v_xy);
  const NodeVector bc = net.input_gain();

  DiscreteThermalModel model;
  model.dt = dt;
  model.v_bucket = v_xy;
  model.method = method;
  if (method == Discretization::euler) {
    model.A = NodeMatrix::Identity() + ac * dt;
    model.B = NodeMatrix(bc.asDiagonal()) * dt;
  } else {
    constexpr int n = static_cast<int>(kNumNodes);
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = ac * dt;
    aug.topRightCorner(n, n) = NodeMatrix(bc.asDiagonal()) * dt;
    const Eigen::MatrixXd e = aug.exp();
    model.A = e.topLeftCorner(n, n);
    model.B = e.topRightCorner(n, n);
  }
  model.A.row(kAmbientNode).setZero();
  model.A(kAmbientNode, kAmbientNode) = 1.0;
  model.B.row(kAmbientNode).setZero();
  model.B.col(kAmbientNode).setZero();
  return model;
}

TemperatureState step(const DiscreteThermalModel& model, const TemperatureState& state,
                      const HeatVector& u) {
  require_zero_ambient_input(u);
  TemperatureState next;
  next.temps.noalias() = model.A * state.temps;
  next.temps.noalias() += model.B * u.q;
  next.temps[kAmbientNode] = state.temps[kAmbientNode];
  return next;
}

TemperatureState steady_state(const ThermalNetwork& net, const HeatVector& u, double v_xy) {
  return steady_state(net, u, v_xy, net.ambient_temp());
}

TemperatureState steady_state(const ThermalNetwork& net, const HeatVector& u, double v_xy,
                              double ambient_temp) {
  require_zero_ambient_input(u);
  constexpr int n = static_cast<int>(kNumNodes) - 1;
  const NodeMatrix ac = net.system_matrix(v_xy);
  const NodeVector bc = net.input_gain();

  const Eigen::Matrix<double, n, n> block = ac.topLeftCorner<n, n>();
  const Eigen::FullPivLU<Eigen::Matrix<double, n, n>> lu(block);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::singular_system,
                "non-ambient system block is singular (a node has no path to ambient)");
  }
  const Eigen::Matrix<double, n, 1> rhs =
      -(ac.topRightCorner<n, 1>() * ambient_temp + bc.head<n>().cwiseProduct(u.q.head<n>()));
  TemperatureState out;
  out.temps.head<n>() = lu.solve(rhs);
  out.temps[kAmbientNode] = ambient_temp;
  return out;
}

double spectral_radius(const NodeMatrix& m) {
  const Eigen::EigenSolver<NodeMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ModelCache::ModelCache(ThermalNetwork net, double dt, double bucket_width, Discretization method)
    : net_(std::move(net)), dt_(dt), bucket_width_(bucket_width), method_(method) {
  if (!(bucket_width > 0.0) || !std::isfinite(bucket_width)) {
    throw Error(ErrorKind::invalid_argument, "bucket width must be positive");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
}

long ModelCache::bucket_index(double v_xy) const {
  if (!(v_xy > 0.0)) return 0;
  return static_cast<long>(std::floor(v_xy / bucket_width_));
}

const DiscreteThermalModel& ModelCache::lookup(double v_xy) const {
  return lookup_bucket(bucket_index(v_xy));
}

const DiscreteThermalModel& ModelCache::lookup_bucket(long k) const {
  {
    std::shared_lock lock(mutex_);
    const auto it = models_.find(k);
    if (it != models_.end()) return *it->second;
  }
  std::unique_lock lock(mutex_);
  auto& slot = models_[k];
  if (!slot) {
    slot = std::make_unique<DiscreteThermalModel>(
        discretize(net_, static_cast<double>(k) * bucket_width_, dt_, method_));
  }
  return *slot;
}

void ModelCache::prepopulate(double v_max) const {
  const long last = bucket_index(v_max);
  for (long k = 0; k <= last; ++k) lookup_bucket(k);
}

std::size_t ModelCache::size() const {
  std::shared_lock lock(mutex_);
  return models_.size();
}

}  // namespace legtherm
