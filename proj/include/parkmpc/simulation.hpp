#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "parkmpc/mpc.hpp"
#include "parkmpc/trajectory.hpp"
#include "parkmpc/vehicle_model.hpp"

namespace parkmpc {

struct Scenario {
  Trajectory trajectory;
  VehicleState initial_state{};
  VehicleParams vehicle{};
  MpcConfig mpc{};
  double duration{30.0};           // wall-clock budget [s]
  int actuation_delay_steps{1};    // controller periods a command spends in flight
};

/// Throws ConfigError on any violated invariant: duration and delay
/// ranges, finite initial state, vehicle/mpc parameter ranges, and the
/// coarse-input contract that consecutive waypoints are 0.25-2.0 m
/// apart.
void validate(const Scenario& scenario);

/// Closest point of the polyline to `position`.
struct PathProjection {
  double arc_length{0.0};     // along the trajectory [m]
  double signed_offset{0.0};  // lateral distance, positive left of the path
  std::size_t segment{0};     // index i of the segment (i, i+1)
};

PathProjection project_to_path(const Trajectory& traj, const Eigen::Vector2d& position);

struct SimSample {
  double t{0.0};
  VehicleState state{};
  ControlCommand command{};       // as computed this tick, before actuation delay
  double cross_track_error{0.0};  // signed, positive left of the path
  double heading_error{0.0};      // vehicle minus path heading [rad]
  double v_error{0.0};            // vehicle minus reference speed [m/s]
  int qp_iterations{0};
  bool constraint_active{false};
};

struct SimResult {
  std::vector<SimSample> samples;  // one per controller tick, t = k * T_s
  bool failed{false};
  std::string failure_reason;
  bool reached_goal{false};
};

struct Metrics {
  double max_cross_track{0.0};      // [m]
  double rms_cross_track{0.0};      // [m]
  double max_overshoot{0.0};        // signed cross-track at the largest deviation [m]
  double final_position_error{0.0}; // distance to the last waypoint [m]
  double final_speed{0.0};          // [m/s]
  double max_steering_rate{0.0};    // [rad per controller step]
  int steps_at_constraint{0};
};

/// Closed-loop run: each controller tick computes a command, pushes it
/// through the actuation-delay FIFO, and integrates the nonlinear plant
/// with ten forward-Euler substeps per tick. Terminates at `duration`
/// or once the final waypoint is reached within 0.05 m at |v| < 0.01
/// m/s. A controller exception stops the run and returns the partial
/// result with the failure flag set. In velocity passthrough mode the
/// plant side emulates a subordinate speed servo that turns the delayed
/// v_cmd into a bounded acceleration.
SimResult run_closed_loop(const Scenario& scenario);

/// Tracking metrics over a finished run; cross-track errors are signed
/// nearest-segment distances against `trajectory`.
Metrics compute_metrics(const SimResult& result, const Trajectory& trajectory);

/// Lateral S-shift maneuver: straight lead-in, smoothstep lateral
/// transition of `lateral_offset` meters over `transition_length`
/// meters, straight lead-out; waypoints every 0.5 m of arc length with
/// a trapezoidal speed profile from standstill to `cruise_speed` and
/// back to standstill. The initial state sits on the second waypoint so
/// the speed-integrated preview sees a nonzero reference speed and can
/// pull away from standstill. Rejects cruise speeds of 10 m/s or more
/// (outside the low-speed validity of the kinematic model).
Scenario make_s_curve_scenario(double lateral_offset, double transition_length,
                               double cruise_speed);

}  // namespace parkmpc
