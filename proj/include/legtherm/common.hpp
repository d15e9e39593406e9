#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace legtherm {

inline constexpr std::size_t kNumMotors = 12;
inline constexpr std::size_t kNumNodes = 14;
inline constexpr std::size_t kComputerNode = 12;
inline constexpr std::size_t kAmbientNode = 13;
inline constexpr std::size_t kNumLegs = 4;
inline constexpr std::size_t kJointsPerLeg = 3;

/// Node-ordered vector: [12 motors, computer, ambient].
using NodeVector = Eigen::Matrix<double, 14, 1>;
using NodeMatrix = Eigen::Matrix<double, 14, 14>;
/// Joint-ordered array: [FL, FR, RL, RR] x [HAA, HFE, KFE].
using JointArray = std::array<double, kNumMotors>;

enum class JointType { haa = 0, hfe = 1, kfe = 2 };

constexpr std::size_t joint_index(std::size_t leg, JointType type) {
  return leg * kJointsPerLeg + static_cast<std::size_t>(type);
}
constexpr JointType joint_type(std::size_t joint) {
  return static_cast<JointType>(joint % kJointsPerLeg);
}
constexpr std::size_t joint_leg(std::size_t joint) { return joint / kJointsPerLeg; }
constexpr bool is_left_leg(std::size_t leg) { return leg == 0 || leg == 2; }

std::string_view leg_name(std::size_t leg);
std::string_view joint_type_name(JointType type);
/// "FL_HAA", "RR_KFE", ...
std::string joint_label(std::size_t joint);

enum class ErrorKind {
  missing_node,
  invalid_node,
  non_positive_parameter,
  duplicate_edge,
  invalid_edge,
  disconnected_graph,
  not_convective,
  dimension_mismatch,
  singular_system,
  empty_window,
  incomplete_record,
  config_error,
  invalid_argument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Issue {
  ErrorKind kind;
  std::string message;
};

/// Thrown by validators; carries every violated constraint, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const noexcept { return issues_; }
  bool has(ErrorKind kind) const noexcept;

 private:
  std::vector<Issue> issues_;
};

[[noreturn]] void throw_dimension_mismatch(std::string_view what, std::size_t expected,
                                           std::size_t got);

}  // namespace legtherm
