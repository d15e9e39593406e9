#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "legtherm/heat_input.hpp"

using namespace legtherm;

TEST_CASE("rms torque") {
  CHECK(rms_torque(std::vector<double>{3, 3, 3, 3}) == 3.0);
  CHECK(rms_torque(std::vector<double>{0, 4}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(rms_torque(std::vector<double>{-3, 3}) == 3.0);
  CHECK(rms_torque(std::vector<double>{-2.5}) == 2.5);
  try {
    rms_torque(std::vector<double>{});
    FAIL("expected empty_window");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_window);
  }
}

TEST_CASE("joule heat") {
  MotorElectricalParams p;
  p.torque_constant = 0.6;
  p.winding_resistance = 0.3;
  CHECK(joule_heat(0.0, p) == 0.0);
  CHECK(joule_heat(6.0, p) == doctest::Approx(30.0).epsilon(1e-14));
  CHECK(joule_heat(3.0, p) * 4.0 == doctest::Approx(joule_heat(6.0, p)).epsilon(1e-14));
}

TEST_CASE("friction heat") {
  MotorElectricalParams p;
  p.friction_coeff = 0.01;
  CHECK(friction_heat(0.0, p) == 0.0);
  CHECK(friction_heat(10.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(friction_heat(-7.0, p) == friction_heat(7.0, p));
}

TEST_CASE("electrical parameter validation") {
  MotorElectricalParams p;
  p.torque_constant = 0.0;
  p.driver_power = -1.0;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 2);
  }
  CHECK_NOTHROW(validate(MotorElectricalParams{}));
}

TEST_CASE("assemble heat vector") {
  std::array<MotorWindow, kNumMotors> windows{};
  std::array<MotorElectricalParams, kNumMotors> params{};
  SUBCASE("idle robot") {
    for (auto& p : params) p.driver_power = 2.0;
    const HeatVector h = assemble_heat_vector(windows, params, 10.0);
    for (std::size_t m = 0; m < kNumMotors; ++m) CHECK(h.q[m] == 2.0);
    CHECK(h.q[kComputerNode] == 10.0);
    CHECK(h.q[kAmbientNode] == 0.0);
  }
  SUBCASE("all constants zero") {
    for (auto& p : params) p.driver_power = 0.0;
    const HeatVector h = assemble_heat_vector(windows, params, 0.0);
    CHECK(h.q.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("mirrored samples give mirrored heat") {
    for (std::size_t m = 0; m < kNumMotors; ++m) windows[m] = {0.5 * static_cast<double>(m), 0.2 * static_cast<double>(m)};
    std::array<MotorWindow, kNumMotors> mirrored{};
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      mirrored[joint_index(joint_leg(m) ^ 1u, joint_type(m))] = windows[m];
    }
    const HeatVector a = assemble_heat_vector(windows, params, 10.0);
    const HeatVector b = assemble_heat_vector(mirrored, params, 10.0);
    for (std::size_t m = 0; m < kNumMotors; ++m) {
      CHECK(a.q[m] == b.q[joint_index(joint_leg(m) ^ 1u, joint_type(m))]);
    }
  }
  SUBCASE("sum of the three loss terms") {
    windows[5] = {6.0, 10.0};
    params[5] = {0.6, 0.3, 1.5, 0.01};
    const HeatVector h = assemble_heat_vector(windows, params, 10.0);
    CHECK(h.q[5] == doctest::Approx(30.0 + 1.5 + 1.0).epsilon(1e-14));
  }
  SUBCASE("wrong window count") {
    std::vector<MotorWindow> eleven(11);
    try {
      assemble_heat_vector(eleven, params, 10.0);
      FAIL("expected dimension_mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::dimension_mismatch);
    }
  }
}

TEST_CASE("window summary matches rms and mean absolute speed") {
  const std::vector<MotorSample> samples{{3.0, -2.0, 4}, {-4.0, 1.0, 4}, {0.0, 3.0, 4}};
  const MotorWindow w = summarize_window(samples);
  CHECK(w.rms_torque == doctest::Approx(std::sqrt(25.0 / 3.0)).epsilon(1e-15));
  CHECK(w.mean_abs_speed == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(summarize_window(std::vector<MotorSample>{}), Error);
}
