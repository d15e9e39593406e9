#pragma once

#include <array>
#include <string_view>

#include "legtherm/agent_sim.hpp"
#include "legtherm/sim_config.hpp"

namespace legtherm {

enum class Outcome { success, overheated, drifting, failed, stuck };
inline constexpr std::size_t kOutcomeCount = 5;

std::string_view to_string(Outcome o);

/// Precedence: overheated > failed > stuck > drifting > success.
///  - overheated: any motor above t_max in any row
///  - failed: the record is flagged terminated (never set by the scripted harness)
///  - stuck: some window of stuck_window seconds in which the path length travelled stays
///    below stuck_displacement while the commanded speed stays above stuck_command_speed
///  - drifting: lateral deviation from the reference path above drift_distance
/// Throws Error(incomplete_record) for records that are incomplete, empty or inconsistent.
Outcome classify_outcome(const EpisodeRecord& rec, const OutcomeThresholds& th);

double max_motor_temp(const EpisodeRecord& rec);
/// Time of the first row with a motor above `threshold`, if any.
std::optional<double> first_crossing(const EpisodeRecord& rec, double threshold);
/// Mean planar tracking error over the stepped rows (row 0 excluded).
double mean_tracking_error(const EpisodeRecord& rec);

}  // namespace legtherm
