#include "legtherm/common.hpp"

#include <algorithm>

namespace legtherm {

std::string_view leg_name(std::size_t leg) {
  static constexpr std::array<std::string_view, kNumLegs> names{"FL", "FR", "RL", "RR"};
  return names.at(leg);
}

std::string_view joint_type_name(JointType type) {
  switch (type) {
    case JointType::haa: return "HAA";
    case JointType::hfe: return "HFE";
    case JointType::kfe: return "KFE";
  }
  return "?";
}

std::string joint_label(std::size_t joint) {
  std::string label(leg_name(joint_leg(joint)));
  label += '_';
  label += joint_type_name(joint_type(joint));
  return label;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_node: return "MissingNode";
    case ErrorKind::invalid_node: return "InvalidNode";
    case ErrorKind::non_positive_parameter: return "NonPositiveParameter";
    case ErrorKind::duplicate_edge: return "DuplicateEdge";
    case ErrorKind::invalid_edge: return "InvalidEdge";
    case ErrorKind::disconnected_graph: return "DisconnectedGraph";
    case ErrorKind::not_convective: return "NotConvective";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::empty_window: return "EmptyWindow";
    case ErrorKind::incomplete_record: return "IncompleteRecord";
    case ErrorKind::config_error: return "ConfigError";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {
std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(issue.kind)) + ": " + issue.message;
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? ErrorKind::config_error : issues.front().kind,
            std::to_string(issues.size()) + " violation(s): " + join_issues(issues)),
      issues_(std::move(issues)) {}

bool ValidationError::has(ErrorKind kind) const noexcept {
  return std::any_of(issues_.begin(), issues_.end(),
                     [kind](const Issue& i) { return i.kind == kind; });
}

void throw_dimension_mismatch(std::string_view what, std::size_t expected, std::size_t got) {
  throw Error(ErrorKind::dimension_mismatch, std::string(what) + ": expected length " +
                                                 std::to_string(expected) + ", got " +
                                                 std::to_string(got));
}

}  // namespace legtherm
