#include <doctest.h>

#include <cmath>
#include <numeric>

#include "legtherm/reward_engine.hpp"

using namespace legtherm;

namespace {

RewardSnapshot perfect_tracking() {
  RewardSnapshot s;
  s.v_cmd_xy = {0.8, -0.1};
  s.v_xy = s.v_cmd_xy;
  s.yaw_rate_cmd = 0.4;
  s.yaw_rate = 0.4;
  s.body_height = 0.38;
  s.foot_heights = {0.2, 0.2, 0.2, 0.2};
  return s;
}

}  // namespace

TEST_CASE("nominal tracking terms") {
  const RewardWeights w;
  RewardSnapshot s = perfect_tracking();
  auto r = nominal_rewards(s, w);
  CHECK(r[RewardTerm::lin_track] == 1.0);
  CHECK(r[RewardTerm::ang_track] == 0.5);
  CHECK(r[RewardTerm::body_height] == 0.0);
  CHECK(r.total == doctest::Approx(1.5).epsilon(1e-15));

  s.v_xy = {s.v_cmd_xy[0] + 0.3, s.v_cmd_xy[1] + 0.4};
  r = nominal_rewards(s, w);
  CHECK(r[RewardTerm::lin_track] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(r[RewardTerm::lin_track] == doctest::Approx(0.3679).epsilon(1e-4));
}

TEST_CASE("nominal penalty terms") {
  const RewardWeights w;
  RewardSnapshot s = perfect_tracking();
  s.v_z = 0.5;
  s.omega_xy = {0.3, 0.4};
  s.gravity_xy = {0.1, 0.0};
  s.joint_accels.fill(100.0);
  s.body_height = 0.28;
  s.terminated = true;
  s.foot_heights = {0.1, 0.2, 0.2, 0.2};
  s.foot_xy_speeds = {2.0, 5.0, 0.0, 0.0};
  s.action.fill(0.5);
  s.action_prev.fill(0.25);
  s.action_prev2.fill(0.5);
  const auto r = nominal_rewards(s, w);
  CHECK(r[RewardTerm::lin_vel_z] == doctest::Approx(-2.0 * 0.25));
  CHECK(r[RewardTerm::ang_vel_xy] == doctest::Approx(-0.05 * 0.25));
  CHECK(r[RewardTerm::orientation] == doctest::Approx(-0.2 * 0.01));
  CHECK(r[RewardTerm::joint_accel] == doctest::Approx(-2.5e-7 * 12 * 1e4));
  CHECK(r[RewardTerm::termination] == -200.0);
  CHECK(r[RewardTerm::body_height] == doctest::Approx(-1.0 * 0.01));
  CHECK(r[RewardTerm::foot_clearance] == doctest::Approx(-0.01 * 0.01 * 2.0));
  CHECK(r[RewardTerm::action_rate] == doctest::Approx(-0.01 * 12 * 0.0625));
  // a_t - 2 a_{t-1} + a_{t-2} = 0.5 per joint
  CHECK(r[RewardTerm::smoothness] == doctest::Approx(-0.01 * 12 * 0.25));
  CHECK(r[RewardTerm::thermal] == 0.0);
  CHECK(r[RewardTerm::regularization] == 0.0);
  s.terminated = false;
  CHECK(nominal_rewards(s, w)[RewardTerm::termination] == 0.0);
}

TEST_CASE("thermal weight") {
  const RewardWeights w;
  CHECK(thermal_weight(60.0, w, ThermalWeightMode::smooth) == 1.0);
  CHECK(thermal_weight(30.0, w, ThermalWeightMode::smooth) == doctest::Approx(std::exp(-10.5)).epsilon(1e-12));
  CHECK(thermal_weight(30.0, w, ThermalWeightMode::smooth) == doctest::Approx(2.754e-5).epsilon(1e-3));
  CHECK(thermal_weight(65.0, w, ThermalWeightMode::smooth) == doctest::Approx(std::exp(1.75)).epsilon(1e-12));
  CHECK(thermal_weight(30.0, w, ThermalWeightMode::literal) == 1.0);
  CHECK(thermal_weight(60.0, w, ThermalWeightMode::literal) == 1.0);
  CHECK(thermal_weight(65.0, w, ThermalWeightMode::literal) == doctest::Approx(5.755).epsilon(1e-3));
}

TEST_CASE("thermal reward") {
  const RewardWeights w;
  ThermalRewardInput in;
  in.temps.fill(30.0);
  CHECK(thermal_reward(in, w, ThermalWeightMode::smooth) == 0.0);
  in.temps[2] = 60.0;
  in.temp_rates[2] = 0.1;
  CHECK(thermal_reward(in, w, ThermalWeightMode::smooth) == doctest::Approx(-100.0).epsilon(1e-12));
  in.temp_rates[2] = -0.1;
  CHECK(thermal_reward(in, w, ThermalWeightMode::smooth) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("regularization") {
  const RewardWeights w;
  JointArray a{};
  CHECK(regularization_reward(a, w) == 0.0);
  a.fill(0.1);
  // 0.1 has no exact binary form, so the result sits within a few ulps of -0.012.
  const double r = regularization_reward(a, w);
  CHECK(std::abs(r - (-0.012)) <= 4 * (std::nextafter(0.012, 1.0) - 0.012));
  JointArray b = a;
  for (auto& x : b) x *= 2.0;
  CHECK(regularization_reward(b, w) == doctest::Approx(4.0 * r).epsilon(1e-15));
}

TEST_CASE("residual total") {
  const RewardWeights w;
  RewardSnapshot s = perfect_tracking();
  s.foot_heights = {0.2, 0.2, 0.2, 0.2};
  ThermalRewardInput th;
  th.temps.fill(40.0);
  const JointArray zero{};
  auto r = residual_total(s, th, zero, zero, zero, w, ThermalWeightMode::smooth);
  CHECK(r.total == doctest::Approx(1.5).epsilon(1e-15));

  th.temps[7] = 60.0;
  th.temp_rates[7] = 0.1;
  r = residual_total(s, th, zero, zero, zero, w, ThermalWeightMode::smooth);
  CHECK(r.total == doctest::Approx(-98.5).epsilon(1e-12));
  CHECK(std::accumulate(r.terms.begin(), r.terms.end(), 0.0) == r.total);
}

TEST_CASE("action-history terms use the residual actions") {
  const RewardWeights w;
  RewardSnapshot s = perfect_tracking();
  s.action.fill(2.0);  // nominal actions should not enter
  ThermalRewardInput th;
  JointArray a{}, p{}, p2{};
  a.fill(0.3);
  p.fill(0.1);
  const auto r = residual_total(s, th, a, p, p2, w, ThermalWeightMode::smooth);
  CHECK(r[RewardTerm::action_rate] == doctest::Approx(-0.01 * 12 * 0.04));
  CHECK(r[RewardTerm::smoothness] == doctest::Approx(-0.01 * 12 * 0.01));
  CHECK(r[RewardTerm::regularization] == doctest::Approx(-0.1 * 12 * 0.09));
}

TEST_CASE("reward weight validation") {
  RewardWeights w;
  w.sigma_track = 0.0;
  w.sigma_th = -1.0;
  try {
    validate(w);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 2);
  }
}

TEST_CASE("a hot heating motor outweighs every task term") {
  const RewardWeights w;
  ThermalRewardInput th;
  th.temps[0] = w.t_max;
  th.temp_rates[0] = 0.1;
  CHECK(std::abs(thermal_reward(th, w, ThermalWeightMode::smooth)) >= 100.0);
  CHECK(std::abs(thermal_reward(th, w, ThermalWeightMode::literal)) >= 100.0);
}
