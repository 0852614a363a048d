#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "parkmpc/angles.hpp"
#include "parkmpc/errors.hpp"
#include "parkmpc/vehicle_model.hpp"

using namespace parkmpc;

TEST_CASE("default vehicle parameters are accepted") {
  CHECK_NOTHROW(validate(VehicleParams{}));
}

TEST_CASE("parameter validation rejects out-of-range values") {
  VehicleParams p;

  p = VehicleParams{};
  p.wheelbase = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.sample_time = -0.05;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.delta_max = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.delta_max = 1.6;  // beyond pi/2
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.a_min = 0.1;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.a_max = -0.1;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.d_delta_max = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.d_a_max = -1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = VehicleParams{};
  p.v_floor = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("euler step matches a hand-computed update") {
  VehicleParams p;
  p.wheelbase = 2.7;
  VehicleState s;
  s.x = 1.0;
  s.y = 2.0;
  s.v = 3.0;
  s.theta = 0.5;
  const VehicleState n = nonlinear_step(s, ControlInput{0.4, 0.2}, 0.1, p);
  CHECK(n.x == doctest::Approx(1.2632747685671117).epsilon(1e-14));
  CHECK(n.y == doctest::Approx(2.143827661581261).epsilon(1e-14));
  CHECK(n.v == doctest::Approx(3.04).epsilon(1e-14));
  CHECK(n.theta == doctest::Approx(0.5222222222222223).epsilon(1e-14));
}

TEST_CASE("euler step trivia: standstill and straight motion") {
  VehicleParams p;
  VehicleState origin;
  const VehicleState still = nonlinear_step(origin, ControlInput{0.0, 0.7}, 0.1, p);
  CHECK(still.x == 0.0);
  CHECK(still.y == 0.0);
  CHECK(still.v == 0.0);
  CHECK(still.theta == 0.0);

  VehicleState rolling;
  rolling.v = 1.0;
  const VehicleState ahead = nonlinear_step(rolling, ControlInput{0.0, 0.0}, 0.1, p);
  CHECK(ahead.x == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(ahead.y == 0.0);
  CHECK(ahead.v == 1.0);
  CHECK(ahead.theta == 0.0);
}

TEST_CASE("euler step rejects bad dt and non-finite input") {
  VehicleParams p;
  VehicleState s;
  CHECK_THROWS_AS(nonlinear_step(s, ControlInput{}, 0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(nonlinear_step(s, ControlInput{}, -0.1, p), std::invalid_argument);
  s.v = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nonlinear_step(s, ControlInput{}, 0.1, p), std::invalid_argument);
  s.v = 1.0;
  CHECK_THROWS_AS(nonlinear_step(s, ControlInput{std::numeric_limits<double>::infinity(), 0.0},
                                 0.1, p),
                  std::invalid_argument);
}

TEST_CASE("zero steering preserves heading bit-exactly") {
  VehicleParams p;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> angle(-std::numbers::pi + 1e-12, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    VehicleState s;
    s.theta = angle(rng);
    s.v = speed(rng);
    const VehicleState n = nonlinear_step(s, ControlInput{0.3, 0.0}, 0.05, p);
    CHECK(n.theta == s.theta);
  }
}

TEST_CASE("heading output stays wrapped when crossing the seam") {
  VehicleParams p;
  p.wheelbase = 2.7;
  VehicleState s;
  s.theta = std::numbers::pi - 1e-3;
  s.v = 1.0;
  const VehicleState n = nonlinear_step(s, ControlInput{0.0, p.wheelbase}, 0.01, p);
  // increment 0.01 pushes past +pi, result re-enters from -pi
  CHECK(n.theta <= std::numbers::pi);
  CHECK(n.theta > -std::numbers::pi);
  CHECK(n.theta == doctest::Approx(s.theta + 0.01 - 2.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("one euler step turns at exactly tan_delta over wheelbase") {
  VehicleParams p;
  p.wheelbase = 2.7;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 100; ++i) {
    VehicleState s;
    s.theta = u(rng);
    s.v = 1.0 + u(rng);
    const double tan_delta = u(rng);
    const double dt = 0.02;
    const VehicleState n = nonlinear_step(s, ControlInput{0.0, tan_delta}, dt, p);
    const double curvature = angle_diff(n.theta, s.theta) / (s.v * dt);
    CHECK(curvature == doctest::Approx(tan_delta / p.wheelbase).epsilon(1e-12));
  }
}

TEST_CASE("linearization matches the frozen-parameter matrices") {
  VehicleParams p;
  p.sample_time = 0.1;
  p.wheelbase = 2.7;

  VehicleState s;
  s.v = 1.0;
  s.theta = 0.0;
  LinearModel m = linearize(s, p);
  CHECK(m.A(0, 2) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.A(1, 2) == 0.0);
  CHECK(m.B(3, 1) == doctest::Approx(0.1 / 2.7).epsilon(1e-15));
  CHECK(m.B(2, 0) == doctest::Approx(0.1).epsilon(1e-15));
  // everything else in A is the identity
  Eigen::Matrix4d a_rest = m.A;
  a_rest(0, 2) = 0.0;
  CHECK(a_rest.isApprox(Eigen::Matrix4d::Identity()));

  s.theta = std::numbers::pi / 2.0;
  m = linearize(s, p);
  CHECK(std::abs(m.A(0, 2)) < 1e-16);
  CHECK(m.A(1, 2) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("output map selects lateral position, speed, and heading") {
  const LinearModel m = linearize(VehicleState{}, VehicleParams{});
  Eigen::Matrix<double, 3, 4> expected;
  expected.setZero();
  expected(0, 1) = 1.0;
  expected(1, 2) = 1.0;
  expected(2, 3) = 1.0;
  CHECK(m.C == expected);
  CHECK(m.D.isZero(0.0));
}

TEST_CASE("linearization floors the speed magnitude but keeps its sign") {
  VehicleParams p;
  const double scale = p.sample_time / p.wheelbase;

  VehicleState s;
  s.v = 0.0;
  CHECK(linearize(s, p).B(3, 1) == doctest::Approx(p.v_floor * scale).epsilon(1e-15));

  s.v = 0.01;
  CHECK(linearize(s, p).B(3, 1) == doctest::Approx(p.v_floor * scale).epsilon(1e-15));

  s.v = -0.01;
  CHECK(linearize(s, p).B(3, 1) == doctest::Approx(-p.v_floor * scale).epsilon(1e-15));

  s.v = -0.8;
  CHECK(linearize(s, p).B(3, 1) == doctest::Approx(-0.8 * scale).epsilon(1e-15));
}

TEST_CASE("linear and nonlinear step agree for zero input at frozen heading") {
  VehicleParams p;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    VehicleState s;
    s.x = u(rng);
    s.y = u(rng);
    s.v = 0.2 + std::abs(u(rng));
    s.theta = 0.4 * u(rng);
    const LinearModel m = linearize(s, p);
    const Eigen::Vector4d lin = m.A * s.as_vector();
    const VehicleState nl = nonlinear_step(s, ControlInput{0.0, 0.0}, p.sample_time, p);
    CHECK(lin(0) == doctest::Approx(nl.x).epsilon(1e-14));
    CHECK(lin(1) == doctest::Approx(nl.y).epsilon(1e-14));
    CHECK(lin(2) == doctest::Approx(nl.v).epsilon(1e-14));
    CHECK(lin(3) == doctest::Approx(nl.theta).epsilon(1e-14));
  }
}
