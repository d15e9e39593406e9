#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "legtherm/agent_sim.hpp"
#include "legtherm/control_compose.hpp"
#include "legtherm/heat_input.hpp"
#include "legtherm/reward_engine.hpp"
#include "legtherm/scenario.hpp"
#include "legtherm/thermal_core.hpp"
#include "oracles.hpp"

using namespace legtherm;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  JointArray joints(double lo, double hi) {
    JointArray a{};
    for (auto& x : a) x = uniform(lo, hi);
    return a;
  }
  TemperatureState state(double ambient, double spread) {
    TemperatureState s;
    for (std::size_t i = 0; i < kAmbientNode; ++i) s.temps[i] = ambient + uniform(-spread, spread);
    s.temps[kAmbientNode] = ambient;
    return s;
  }
  HeatVector heat(double hi) {
    HeatVector h;
    for (std::size_t i = 0; i < kAmbientNode; ++i) h.q[i] = uniform(0.0, hi);
    return h;
  }
};

double max_offset(const TemperatureState& s) {
  return (s.temps.head<13>().array() - s.ambient()).abs().maxCoeff();
}

int mirror(int n) {
  if (n >= static_cast<int>(kNumMotors)) return n;
  return static_cast<int>(joint_index(joint_leg(n) ^ 1u, joint_type(n)));
}

const SimContext& ctx_with_heat(bool enabled) {
  static const SimContext on(default_sim_config());
  static const SimContext off([] {
    SimConfig c = default_sim_config();
    c.thermal.heat_enabled = false;
    return c;
  }());
  return enabled ? on : off;
}

}  // namespace

TEST_CASE("random networks: spectral radius and passivity") {
  Gen g(1);
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkConfig cfg = oracle::random_network(g.rng);
    const ThermalNetwork net = build_network(cfg);
    const double v = g.uniform(0.0, 2.5);
    const auto m = discretize(net, v, 0.02);
    CHECK(spectral_radius(m.A) <= 1.0 + 1e-12);
    for (Eigen::Index i = 0; i < 14; ++i) {
      for (Eigen::Index j = 0; j < 14; ++j) CHECK(m.A(i, j) >= -1e-15);
    }
    TemperatureState s = g.state(cfg.ambient_temp_c, 40.0);
    double prev = max_offset(s);
    for (int k = 0; k < 500; ++k) {
      s = step(m, s, HeatVector{});
      const double cur = max_offset(s);
      CHECK(cur <= prev * (1.0 + 1e-12));
      CHECK(s.ambient() == cfg.ambient_temp_c);
      prev = cur;
    }
  }
}

TEST_CASE("random networks: exact stepping tracks a fine fourth-order integration") {
  Gen g(2);
  for (int trial = 0; trial < 6; ++trial) {
    const NetworkConfig cfg = oracle::random_network(g.rng);
    const ThermalNetwork net = build_network(cfg);
    TemperatureState s = g.state(cfg.ambient_temp_c, 20.0);
    oracle::Temps ref{};
    for (std::size_t i = 0; i < kNumNodes; ++i) ref[i] = s.temps[static_cast<Eigen::Index>(i)];
    double worst = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
      const HeatVector h = g.heat(40.0);
      const double v = g.uniform(0.0, 2.0);
      oracle::Temps q{};
      for (std::size_t i = 0; i < kNumNodes; ++i) q[i] = h.q[static_cast<Eigen::Index>(i)];
      const auto m = discretize(net, v, 0.02);
      for (int k = 0; k < 100; ++k) {
        s = step(m, s, h);
        ref = oracle::rk4(cfg, ref, q, v, 1e-4, 200);
        for (std::size_t i = 0; i < kNumNodes; ++i) worst = std::max(worst, std::abs(ref[i] - s.temps[static_cast<Eigen::Index>(i)]));
      }
    }
    CHECK(worst < 0.01);
  }
}

TEST_CASE("random networks: energy is conserved on an island") {
  Gen g(3);
  BuildOptions opts;
  opts.require_ambient_path = false;
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkConfig cfg = oracle::island(oracle::random_network(g.rng));
    const ThermalNetwork net = build_network(cfg, opts);
    const auto m = discretize(net, g.uniform(0.0, 2.0), 0.02);
    TemperatureState s = g.state(cfg.ambient_temp_c, 15.0);
    auto energy = [&](const TemperatureState& st) {
      double e = 0.0;
      for (std::size_t i = 0; i < kAmbientNode; ++i) e += net.capacitance(i) * st.temps[static_cast<Eigen::Index>(i)];
      return e;
    };
    const double e0 = energy(s);
    double injected = 0.0;
    const HeatVector h = g.heat(20.0);
    for (int k = 0; k < 2000; ++k) {
      s = step(m, s, h);
      injected += 0.02 * h.total();
    }
    CHECK(std::abs(energy(s) - (e0 + injected)) <= 1e-6 * std::abs(e0 + injected));
  }
}

TEST_CASE("mirroring the legs mirrors the trajectory exactly") {
  const ThermalNetwork net = build_network(default_network_config());
  Gen g(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = discretize(net, g.uniform(0.0, 2.0), 0.02);
    TemperatureState a = g.state(net.ambient_temp(), 30.0);
    TemperatureState b;
    for (int i = 0; i < 14; ++i) b.temps[mirror(i)] = a.temps[i];
    for (int k = 0; k < 200; ++k) {
      const HeatVector ha = g.heat(30.0);
      HeatVector hb;
      for (int i = 0; i < 14; ++i) hb.q[mirror(i)] = ha.q[i];
      a = step(m, a, ha);
      b = step(m, b, hb);
    }
    for (int i = 0; i < 14; ++i) CHECK(b.temps[mirror(i)] == doctest::Approx(a.temps[i]).epsilon(1e-13));
  }
}

TEST_CASE("heat inputs are non-negative and permutation-equivariant") {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<MotorWindow, kNumMotors> w{};
    std::array<MotorElectricalParams, kNumMotors> p{};
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      std::vector<double> taus(4);
      for (auto& t : taus) t = g.uniform(-33.5, 33.5);
      w[m] = {rms_torque(taus), g.uniform(0.0, 30.0)};
      p[m] = {g.uniform(0.1, 1.0), g.uniform(0.05, 1.0), g.uniform(0.0, 3.0), g.uniform(0.0, 0.02)};
      CHECK(rms_torque(std::vector<double>{taus[0]}) == std::abs(taus[0]));
    }
    const HeatVector h = assemble_heat_vector(w, p, g.uniform(0.0, 20.0));
    CHECK(h.q.minCoeff() >= 0.0);
    CHECK(h.q[kAmbientNode] == 0.0);
    std::array<std::size_t, kNumMotors> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.rng);
    std::array<MotorWindow, kNumMotors> wp{};
    std::array<MotorElectricalParams, kNumMotors> pp{};
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      wp[perm[m]] = w[m];
      pp[perm[m]] = p[m];
    }
    const HeatVector hp = assemble_heat_vector(wp, pp, h.q[kComputerNode]);
    for (std::size_t m = 0; m < kNumMotors; ++m) CHECK(hp.q[perm[m]] == h.q[m]);
  }
}

TEST_CASE("thermal weight shape") {
  const RewardWeights w;
  double prev = thermal_weight(-40.0, w, ThermalWeightMode::smooth);
  for (double t = -39.9; t <= 120.0; t += 0.1) {
    const double cur = thermal_weight(t, w, ThermalWeightMode::smooth);
    CHECK(cur > prev);
    CHECK(cur - prev <= 0.1 * w.sigma_th * cur);
    if (t >= w.t_max) CHECK(cur == thermal_weight(t, w, ThermalWeightMode::literal));
    prev = cur;
  }
}

TEST_CASE("thermal reward is linear in the rates") {
  const RewardWeights w;
  Gen g(6);
  for (int trial = 0; trial < 200; ++trial) {
    ThermalRewardInput in;
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      in.temps[m] = g.uniform(20.0, 75.0);
      in.temp_rates[m] = g.uniform(-0.5, 0.5);
    }
    const double alpha = g.uniform(-3.0, 3.0);
    ThermalRewardInput scaled = in;
    for (auto& r : scaled.temp_rates) r *= alpha;
    for (auto mode : {ThermalWeightMode::smooth, ThermalWeightMode::literal}) {
      const double base = thermal_reward(in, w, mode);
      CHECK(thermal_reward(scaled, w, mode) == doctest::Approx(alpha * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("reward breakdowns sum to the total and ignore foot labels") {
  const RewardWeights w;
  Gen g(7);
  for (int trial = 0; trial < 200; ++trial) {
    RewardSnapshot s;
    s.v_cmd_xy = {g.uniform(-2, 2), g.uniform(-1, 1)};
    s.v_xy = {g.uniform(-2, 2), g.uniform(-1, 1)};
    s.yaw_rate_cmd = g.uniform(-2, 2);
    s.yaw_rate = g.uniform(-2, 2);
    s.v_z = g.uniform(-0.3, 0.3);
    s.omega_xy = {g.uniform(-1, 1), g.uniform(-1, 1)};
    s.gravity_xy = {g.uniform(-0.2, 0.2), g.uniform(-0.2, 0.2)};
    s.joint_accels = g.joints(-500, 500);
    s.body_height = g.uniform(0.2, 0.45);
    for (std::size_t f = 0; f < kNumLegs; ++f) {
      s.foot_heights[f] = g.uniform(0.0, 0.1);
      s.foot_xy_speeds[f] = g.uniform(0.0, 3.0);
    }
    s.action = g.joints(-1, 1);
    s.action_prev = g.joints(-1, 1);
    s.action_prev2 = g.joints(-1, 1);
    s.terminated = trial % 5 == 0;
    ThermalRewardInput th;
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      th.temps[m] = g.uniform(20, 75);
      th.temp_rates[m] = g.uniform(-0.3, 0.3);
    }
    const JointArray a = g.joints(-0.5, 0.5), p = g.joints(-0.5, 0.5), p2 = g.joints(-0.5, 0.5);
    const RewardBreakdown r = residual_total(s, th, a, p, p2, w, ThermalWeightMode::smooth);
    double sum = 0.0;
    for (double t : r.terms) sum += t;
    CHECK(sum == r.total);

    const RewardBreakdown n = nominal_rewards(s, w);
    RewardSnapshot sp = s;
    std::array<std::size_t, kNumLegs> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), g.rng);
    for (std::size_t f = 0; f < kNumLegs; ++f) {
      sp.foot_heights[perm[f]] = s.foot_heights[f];
      sp.foot_xy_speeds[perm[f]] = s.foot_xy_speeds[f];
    }
    CHECK(nominal_rewards(sp, w)[RewardTerm::foot_clearance] ==
          doctest::Approx(n[RewardTerm::foot_clearance]).epsilon(1e-14));
  }
}

TEST_CASE("composition, torque bounds and observation round trips") {
  Gen g(8);
  const JointLimits lim = default_joint_limits();
  const PdGains gains;
  for (int trial = 0; trial < 500; ++trial) {
    const JointArray theta0 = g.joints(-1, 1), an = g.joints(-1, 1), ar = g.joints(-1, 1);
    const auto c1 = compose_actions(theta0, an, ar, lim);
    const auto c2 = compose_actions(theta0, ar, an, lim);
    CHECK(c1.target == c2.target);
    CHECK(compose_actions(theta0, an, JointArray{}, lim).target == compose_actions(theta0, an, JointArray{}, lim).target);

    JointState js;
    js.position = g.joints(-3, 3);
    js.velocity = g.joints(-40, 40);
    for (double t : pd_torque(g.joints(-3, 3), js, gains)) CHECK(std::abs(t) <= gains.torque_limit);

    ObservationParts p;
    for (auto& x : p.command) x = g.uniform(-2, 2);
    for (auto& x : p.ang_vel) x = g.uniform(-2, 2);
    for (auto& x : p.gravity) x = g.uniform(-1, 1);
    p.joint_pos = g.joints(-3, 3);
    p.joint_vel = g.joints(-20, 20);
    for (auto& x : p.motor_temps) x = g.uniform(0, 90);
    for (auto& x : p.latent) x = g.uniform(-5, 5);
    p.prev_action = g.joints(-3, 3);
    const ObservationVector v = assemble(p, ObsLayout::residual);
    CHECK(deassemble(v) == p);
    CHECK(assemble(deassemble(v), ObsLayout::residual).values == v.values);
    const ObservationVector nv = assemble(p, ObsLayout::nominal);
    CHECK(assemble(deassemble(nv), ObsLayout::nominal).values == nv.values);
  }
}

TEST_CASE("harness: the governed peak temperature never exceeds the nominal one") {
  const SimContext& ctx = ctx_with_heat(true);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (auto kind : {ScenarioKind::randomized, ScenarioKind::long_horizon, ScenarioKind::standing}) {
      const Scenario sc = make_scenario(ctx.config(), kind, seed, 60.0);
      EpisodeOptions o;
      o.detailed = false;
      const EpisodeRecord nom = run_episode(ctx, sc.setup, sc.profile, PolicyMode::nominal_only, o);
      const EpisodeRecord gov = run_episode(ctx, sc.setup, sc.profile, PolicyMode::governed, o);
      REQUIRE(nom.size() == gov.size());
      double peak_nom = -1e9, peak_gov = -1e9;
      for (std::size_t k = 0; k < nom.size(); ++k) {
        peak_nom = std::max(peak_nom, *std::max_element(nom.temps[k].begin(), nom.temps[k].begin() + kNumMotors));
        peak_gov = std::max(peak_gov, *std::max_element(gov.temps[k].begin(), gov.temps[k].begin() + kNumMotors));
        CHECK(peak_gov <= peak_nom);
      }
    }
  }
}

TEST_CASE("harness: the governor is neutral while motors stay cool") {
  const SimContext& ctx = ctx_with_heat(true);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Scenario sc = make_scenario(ctx.config(), ScenarioKind::long_horizon, seed, 30.0);
    const EpisodeRecord nom = run_episode(ctx, sc.setup, sc.profile, PolicyMode::nominal_only);
    const EpisodeRecord gov = run_episode(ctx, sc.setup, sc.profile, PolicyMode::governed);
    double hottest = 0.0;
    for (const auto* r : {&nom, &gov}) {
      for (const auto& row : r->temps) hottest = std::max(hottest, *std::max_element(row.begin(), row.begin() + kNumMotors));
    }
    if (hottest > 35.0) continue;
    ++checked;
    double diff = 0.0, base = 0.0;
    for (std::size_t k = 1; k < nom.size(); ++k) {
      diff += std::abs(gov.tracking_error[k] - nom.tracking_error[k]);
      base += nom.tracking_error[k];
    }
    CHECK(diff <= 1e-3 * base);
  }
  CHECK(checked >= 6);
}

TEST_CASE("harness: without heat every motor relaxes toward ambient") {
  const SimContext& ctx = ctx_with_heat(false);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (auto kind : {ScenarioKind::long_horizon, ScenarioKind::randomized, ScenarioKind::standing}) {
      const Scenario sc = make_scenario(ctx.config(), kind, seed, 60.0);
      EpisodeOptions o;
      o.detailed = false;
      for (auto mode : {PolicyMode::nominal_only, PolicyMode::governed}) {
        const EpisodeRecord r = run_episode(ctx, sc.setup, sc.profile, mode, o);
        const double amb = sc.setup.ambient_temp;
        auto offset = [&](std::size_t k, std::size_t m) { return std::abs(r.temps[k][m] - amb); };
        for (std::size_t k = 1; k < r.size(); ++k) {
          double prev_max = 0.0, cur_max = 0.0;
          for (std::size_t m = 0; m < kNumMotors; ++m) {
            prev_max = std::max(prev_max, offset(k - 1, m));
            cur_max = std::max(cur_max, offset(k, m));
            // A uniform start cannot produce hot spots, so each motor decays on its own.
            if (kind == ScenarioKind::long_horizon) CHECK(offset(k, m) <= offset(k - 1, m) + 1e-12);
          }
          CHECK(cur_max <= prev_max + 1e-12);
        }
      }
    }
  }
}
