#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "legtherm/agent_sim.hpp"
#include "legtherm/experiments.hpp"

namespace legtherm {

inline constexpr std::string_view kTraceFormat = "legtherm-trace/1";
inline constexpr std::string_view kSummaryFormat = "legtherm-summary/1";

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Trace column order:
///   step, time, T_<node label> x14, cmd_vx, cmd_vy, cmd_yaw, mod_vx, mod_vy, mod_yaw,
///   ach_vx, ach_vy, ach_yaw, tracking_error, governor_weight, r_<term> x13, reward_total,
///   Q_<node label> x14, a_nom_<joint> x12, a_res_<joint> x12, clip_events,
///   saturation_events, x, y, heading, distance, lateral_deviation
std::vector<std::string> trace_columns();

/// One row per record row after a "# legtherm-trace/1" line. Needs a detailed record.
void write_trace_csv(std::ostream& out, const EpisodeRecord& rec);

/// Labels of the 14 thermal nodes in node order.
std::vector<std::string> node_labels();

std::string long_horizon_summary_json(const LongHorizonResult& res);
std::string terrain_summary_json(const TerrainSuiteResult& res);

/// Tracking error versus peak motor temperature, one row per agent.
void write_scatter_csv(std::ostream& out, const LongHorizonResult& res);

/// layout, field, offset, length for both observation layouts.
void write_layout_csv(std::ostream& out);
std::string layout_json();

/// Thermal weight and thermal reward in both modes for t_min, t_min + step, ..., t_max.
/// The reward column is for a single motor at that temperature changing at `rate` degC/s.
void write_reward_sweep_csv(std::ostream& out, const RewardWeights& w, double t_min, double t_max, double step,
                            double rate = 0.1);

}  // namespace legtherm
