#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "legtherm/common.hpp"

namespace legtherm {

enum class NodeKind { motor, computer, ambient };

std::string_view to_string(NodeKind kind);

struct ThermalNode {
  int id = 0;
  NodeKind kind = NodeKind::motor;
  std::string label;
  double capacitance = 0.0;  // J/K; unused for the ambient node

  bool operator==(const ThermalNode&) const = default;
};

/// A conduction link (fixed `resistance`) or a node-to-ambient convection link whose
/// resistance falls with planar speed: conv_base / (1 + conv_coeff * v^conv_exponent).
struct ThermalEdge {
  int i = 0;
  int j = 0;
  double resistance = 0.0;  // K/W, conduction edges
  bool convective = false;
  double conv_base = 0.0;  // K/W at rest
  double conv_coeff = 0.0;
  double conv_exponent = 0.8;

  bool operator==(const ThermalEdge&) const = default;
};

struct NetworkConfig {
  double ambient_temp_c = 20.0;
  std::vector<ThermalNode> nodes;
  std::vector<ThermalEdge> edges;

  bool operator==(const NetworkConfig&) const = default;
};

/// Twelve motors, each convectively cooled and chained hip->thigh->knee, with every hip
/// linked to the onboard computer. Values are plausible placeholders, not identified data.
NetworkConfig default_network_config();

struct BuildOptions {
  /// When false, nodes need not reach the ambient node (conduction-only islands).
  bool require_ambient_path = true;
};

class ThermalNetwork {
 public:
  const std::vector<ThermalNode>& nodes() const noexcept { return nodes_; }
  const std::vector<ThermalEdge>& edges() const noexcept { return edges_; }
  double ambient_temp() const noexcept { return ambient_temp_; }
  double capacitance(std::size_t node) const { return nodes_.at(node).capacitance; }
  /// Indices of nodes sharing an edge with `node`.
  const std::vector<std::size_t>& neighbors(std::size_t node) const { return neighbors_.at(node); }

  /// Continuous system matrix with the convection resistances frozen at `v_xy`.
  /// The ambient row is zero.
  NodeMatrix system_matrix(double v_xy) const;
  /// Diagonal of the continuous input matrix (1/C_i; zero for ambient).
  NodeVector input_gain() const;

 private:
  friend ThermalNetwork build_network(const NetworkConfig&, const BuildOptions&);

  double ambient_temp_ = 20.0;
  std::vector<ThermalNode> nodes_;
  std::vector<ThermalEdge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

/// Validates `config` and returns the network with nodes sorted by id.
/// Throws ValidationError listing every violated constraint.
ThermalNetwork build_network(const NetworkConfig& config, const BuildOptions& options = {});

/// Throws Error(not_convective) for conduction edges.
double convection_resistance(const ThermalEdge& edge, double v_xy);
/// Resistance of any edge at speed `v_xy`.
double edge_resistance(const ThermalEdge& edge, double v_xy);

struct TemperatureState {
  NodeVector temps = NodeVector::Zero();

  static TemperatureState uniform(double node_temp, double ambient_temp);
  static TemperatureState from_motor_temps(std::span<const double> motor_temps,
                                           double computer_temp, double ambient_temp);
  static TemperatureState from_span(std::span<const double> values);

  double ambient() const { return temps[kAmbientNode]; }
  double max_motor() const;

  bool operator==(const TemperatureState& o) const { return temps == o.temps; }
};

struct HeatVector {
  NodeVector q = NodeVector::Zero();

  static HeatVector from_span(std::span<const double> values);
  double total() const { return q.sum(); }
};

/// dT/dt for every node; zero for ambient.
NodeVector continuous_derivative(const ThermalNetwork& net, const TemperatureState& state,
                                 const HeatVector& heat_in, double v_xy);

enum class Discretization { exact, euler };

std::string_view to_string(Discretization d);

struct DiscreteThermalModel {
  NodeMatrix A = NodeMatrix::Identity();
  NodeMatrix B = NodeMatrix::Zero();
  double dt = 0.0;
  double v_bucket = 0.0;
  Discretization method = Discretization::exact;
};

/// Zero-order-hold model of the network at a frozen speed. The exact mode exponentiates
/// the augmented matrix [[Ac, Bc], [0, 0]] * dt, which yields B without inverting Ac and
/// so also covers networks with no path to ambient.
DiscreteThermalModel discretize(const ThermalNetwork& net, double v_xy, double dt,
                                Discretization method = Discretization::exact);

/// T_{t+1} = A T_t + B u_t. The ambient entry is carried through unchanged.
TemperatureState step(const DiscreteThermalModel& model, const TemperatureState& state,
                      const HeatVector& u);

/// Temperatures with zero derivative under constant input. Ambient is taken from the network.
TemperatureState steady_state(const ThermalNetwork& net, const HeatVector& u, double v_xy);
TemperatureState steady_state(const ThermalNetwork& net, const HeatVector& u, double v_xy,
                              double ambient_temp);

double spectral_radius(const NodeMatrix& m);

/// Velocity-bucketed cache of discrete models. Bucket k covers [k*w, (k+1)*w) and is
/// discretized at its lower edge, so a robot at rest sees the rest-state resistances.
/// Lookups are thread-safe; each bucket is built at most once.
class ModelCache {
 public:
  ModelCache(ThermalNetwork net, double dt, double bucket_width,
             Discretization method = Discretization::exact);

  const DiscreteThermalModel& lookup(double v_xy) const;
  const DiscreteThermalModel& lookup_bucket(long index) const;
  void prepopulate(double v_max) const;

  long bucket_index(double v_xy) const;
  double bucket_width() const noexcept { return bucket_width_; }
  double dt() const noexcept { return dt_; }
  const ThermalNetwork& network() const noexcept { return net_; }
  std::size_t size() const;

 private:
  ThermalNetwork net_;
  double dt_;
  double bucket_width_;
  Discretization method_;
  mutable std::shared_mutex mutex_;
  mutable std::map<long, std::unique_ptr<DiscreteThermalModel>> models_;
};

}  // namespace legtherm
