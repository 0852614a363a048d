#pragma once

#include <Eigen/Core>

namespace parkmpc {

/// Rear-axle pose and longitudinal speed of the vehicle.
/// State vector order used throughout: [x, y, v, theta].
struct VehicleState {
  double x{0.0};      // rear-axle global X [m]
  double y{0.0};      // rear-axle global Y [m]
  double v{0.0};      // longitudinal speed [m/s]
  double theta{0.0};  // heading [rad], wrapped to (-pi, pi]

  Eigen::Vector4d as_vector() const { return {x, y, v, theta}; }
};

/// Plant input: longitudinal acceleration and the tangent of the front
/// road-wheel angle. The tangent (not the angle) is the model input, so
/// steering bounds map through tan exactly.
struct ControlInput {
  double accel{0.0};      // [m/s^2]
  double tan_delta{0.0};  // tan(road-wheel angle), dimensionless
};

struct VehicleParams {
  double wheelbase{2.7};     // front-to-rear axle distance [m]
  double sample_time{0.05};  // controller period [s]
  double delta_max{0.6};     // road-wheel angle saturation [rad]
  double a_max{2.0};         // [m/s^2]
  double a_min{-2.0};        // [m/s^2]
  double d_delta_max{0.05};  // road-wheel angle rate bound [rad/step]
  double d_a_max{0.5};       // acceleration rate bound [m/s^2 per step]
  double v_floor{0.05};      // speed floor used when linearizing [m/s]
};

/// Discrete state-space matrices frozen at one operating point.
/// x_{k+1} = A x_k + B u_k, y_k = C x_k + D u_k with outputs [y, v, theta].
struct LinearModel {
  Eigen::Matrix4d A;
  Eigen::Matrix<double, 4, 2> B;
  Eigen::Matrix<double, 3, 4> C;
  Eigen::Matrix<double, 3, 2> D;  // identically zero
};

/// Throws ConfigError when a parameter violates its admissible range.
void validate(const VehicleParams& params);

/// One forward-Euler step of the kinematic bicycle equations. All
/// right-hand sides are evaluated at the pre-step state; the returned
/// heading is wrapped to (-pi, pi].
VehicleState nonlinear_step(const VehicleState& state, const ControlInput& input,
                            double dt, const VehicleParams& params);

/// Discrete linearization about the given state. The heading and speed
/// enter A and B as frozen parameters; |v| is floored at params.v_floor
/// (sign preserved) so steering stays controllable near standstill.
LinearModel linearize(const VehicleState& state, const VehicleParams& params);

}  // namespace parkmpc
