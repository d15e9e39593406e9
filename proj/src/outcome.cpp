#include "legtherm/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace legtherm {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::success:
      return "success";
    case Outcome::overheated:
      return "overheated";
    case Outcome::drifting:
      return "drifting";
    case Outcome::failed:
      return "failed";
    case Outcome::stuck:
      return "stuck";
  }
  return "?";
}

double max_motor_temp(const EpisodeRecord& rec) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& row : rec.temps) {
    for (std::size_t i = 0; i < kNumMotors; ++i) m = std::max(m, row[i]);
  }
  return m;
}

std::optional<double> first_crossing(const EpisodeRecord& rec, double threshold) {
  for (std::size_t r = 0; r < rec.temps.size(); ++r) {
    for (std::size_t i = 0; i < kNumMotors; ++i) {
      if (rec.temps[r][i] > threshold) return rec.time[r];
    }
  }
  return std::nullopt;
}

double mean_tracking_error(const EpisodeRecord& rec) {
  if (rec.tracking_error.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < rec.tracking_error.size(); ++i) s += rec.tracking_error[i];
  return s / static_cast<double>(rec.tracking_error.size() - 1);
}

namespace {

bool is_stuck(const EpisodeRecord& rec, const OutcomeThresholds& th) {
  const auto window = static_cast<std::size_t>(std::llround(th.stuck_window / rec.dt));
  const std::size_t n = rec.size();
  if (window == 0 || n <= window) return false;
  // Sliding minimum of commanded speed over rows (i, i + window].
  std::deque<std::size_t> q;
  auto speed = [&](std::size_t r) { return rec.command[r].planar_speed(); };
  for (std::size_t r = 1; r < n; ++r) {
    while (!q.empty() && speed(q.back()) >= speed(r)) q.pop_back();
    q.push_back(r);
    if (r < window) continue;
    const std::size_t start = r - window;
    while (q.front() <= start) q.pop_front();
    if (speed(q.front()) <= th.stuck_command_speed) continue;
    if (rec.distance[r] - rec.distance[start] < th.stuck_displacement) return true;
  }
  return false;
}

}  // namespace

Outcome classify_outcome(const EpisodeRecord& rec, const OutcomeThresholds& th) {
  if (!rec.complete || rec.size() == 0 || !rec.consistent()) {
    throw Error(ErrorKind::incomplete_record, "episode record is incomplete or inconsistent");
  }
  if (max_motor_temp(rec) > th.t_max) return Outcome::overheated;
  if (rec.terminated) return Outcome::failed;
  if (is_stuck(rec, th)) return Outcome::stuck;
  const double drift = *std::max_element(rec.lateral_deviation.begin(), rec.lateral_deviation.end());
  if (drift > th.drift_distance) return Outcome::drifting;
  return Outcome::success;
}

}  // namespace legtherm
