#include "parkmpc/vehicle_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parkmpc/angles.hpp"
#include "parkmpc/errors.hpp"

namespace parkmpc {

void validate(const VehicleParams& p) {
  if (!(p.wheelbase > 0.0)) {
    throw ConfigError("vehicle.wheelbase must be > 0");
  }
  if (!(p.sample_time > 0.0)) {
    throw ConfigError("vehicle.sample_time must be > 0");
  }
  if (!(p.delta_max > 0.0 && p.delta_max < std::numbers::pi / 2.0)) {
    throw ConfigError("vehicle.delta_max must be in (0, pi/2)");
  }
  if (!(p.a_min < 0.0 && 0.0 < p.a_max)) {
    throw ConfigError("vehicle acceleration bounds must satisfy a_min < 0 < a_max");
  }
  if (!(p.d_delta_max > 0.0 && p.d_a_max > 0.0)) {
    throw ConfigError("vehicle rate bounds must be > 0");
  }
  if (!(p.v_floor > 0.0)) {
    throw ConfigError("vehicle.v_floor must be > 0");
  }
}

VehicleState nonlinear_step(const VehicleState& state, const ControlInput& input,
                            double dt, const VehicleParams& params) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("nonlinear_step: dt must be > 0");
  }
  const bool finite = std::isfinite(state.x) && std::isfinite(state.y) &&
                      std::isfinite(state.v) && std::isfinite(state.theta) &&
                      std::isfinite(input.accel) && std::isfinite(input.tan_delta);
  if (!finite) {
    throw std::invalid_argument("nonlinear_step: non-finite state or input");
  }

  VehicleState next;
  next.x = state.x + dt * state.v * std::cos(state.theta);
  next.y = state.y + dt * state.v * std::sin(state.theta);
  next.v = state.v + dt * input.accel;
  next.theta = wrap_angle(state.theta + dt * state.v * input.tan_delta / params.wheelbase);
  return next;
}

LinearModel linearize(const VehicleState& state, const VehicleParams& params) {
  const double ts = params.sample_time;
  const double sign = state.v < 0.0 ? -1.0 : 1.0;
  const double v_eff = sign * std::max(std::abs(state.v), params.v_floor);

  LinearModel m;
  m.A = Eigen::Matrix4d::Identity();
  m.A(0, 2) = ts * std::cos(state.theta);
  m.A(1, 2) = ts * std::sin(state.theta);

  m.B.setZero();
  m.B(2, 0) = ts;
  m.B(3, 1) = ts * v_eff / params.wheelbase;

  m.C.setZero();
  m.C(0, 1) = 1.0;
  m.C(1, 2) = 1.0;
  m.C(2, 3) = 1.0;

  m.D.setZero();
  return m;
}

}  // namespace parkmpc
