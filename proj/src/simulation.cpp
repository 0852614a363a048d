#include "parkmpc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <utility>

#include "parkmpc/angles.hpp"
#include "parkmpc/errors.hpp"

namespace parkmpc {

namespace {
constexpr int kPlantSubsteps = 10;
constexpr double kGoalPositionTol = 0.05;  // [m]
constexpr double kGoalSpeedTol = 0.01;     // [m/s]
constexpr double kMinWaypointGap = 0.25;   // coarse-input contract [m]
constexpr double kMaxWaypointGap = 2.0;
}  // namespace

void validate(const Scenario& scenario) {
  validate(scenario.vehicle);
  validate(scenario.mpc);
  if (!(scenario.duration > 0.0) || !std::isfinite(scenario.duration)) {
    throw ConfigError("sim.duration must be > 0");
  }
  if (scenario.actuation_delay_steps < 0) {
    throw ConfigError("sim.actuation_delay_steps must be >= 0");
  }
  const VehicleState& s = scenario.initial_state;
  if (!(std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.v) &&
        std::isfinite(s.theta))) {
    throw ConfigError("sim.initial_state must be finite");
  }
  const auto& arcs = scenario.trajectory.arclength();
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    const double gap = arcs[i] - arcs[i - 1];
    if (gap < kMinWaypointGap - 1e-9 || gap > kMaxWaypointGap + 1e-9) {
      throw ConfigError("trajectory waypoints must be 0.25-2.0 m apart (violated at index " +
                        std::to_string(i) + ")");
    }
  }
}

PathProjection project_to_path(const Trajectory& traj, const Eigen::Vector2d& position) {
  const auto& pts = traj.waypoints();
  const auto& arcs = traj.arclength();

  PathProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Eigen::Vector2d a(pts[i].x, pts[i].y);
    const Eigen::Vector2d b(pts[i + 1].x, pts[i + 1].y);
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double frac = std::clamp((position - a).dot(ab) / len2, 0.0, 1.0);
    const Eigen::Vector2d proj = a + frac * ab;
    const double d2 = (position - proj).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      const double cross =
          ab.x() * (position.y() - proj.y()) - ab.y() * (position.x() - proj.x());
      best.signed_offset = std::copysign(std::sqrt(d2), cross);
      best.arc_length = arcs[i] + frac * std::sqrt(len2);
      best.segment = i;
    }
  }
  return best;
}

SimResult run_closed_loop(const Scenario& scenario) {
  validate(scenario);

  SimResult result;
  const double ts = scenario.vehicle.sample_time;
  const double dt = ts / kPlantSubsteps;
  const Waypoint& goal = scenario.trajectory.waypoints().back();

  // commands in flight between controller and actuators; neutral fill so
  // the plant coasts until the first real command arrives
  struct Actuation {
    double accel;
    double v_cmd;
    double tan_delta;
  };
  std::deque<Actuation> in_flight(static_cast<std::size_t>(scenario.actuation_delay_steps),
                                  Actuation{0.0, scenario.initial_state.v, 0.0});

  ControllerState ctrl;
  VehicleState state = scenario.initial_state;

  for (int k = 0; k * ts < scenario.duration - 1e-9; ++k) {
    ControlCommand cmd;
    try {
      cmd = control_step(ctrl, state, scenario.trajectory, scenario.mpc, scenario.vehicle);
    } catch (const std::exception& e) {
      result.failed = true;
      result.failure_reason = e.what();
      break;
    }

    const PathProjection proj = project_to_path(scenario.trajectory,
                                                Eigen::Vector2d(state.x, state.y));
    const Waypoint ref = scenario.trajectory.sample(proj.arc_length);

    SimSample sample;
    sample.t = k * ts;
    sample.state = state;
    sample.command = cmd;
    sample.cross_track_error = proj.signed_offset;
    sample.heading_error = angle_diff(state.theta, ref.theta);
    sample.v_error = state.v - ref.v;
    sample.qp_iterations = cmd.diag.qp_iterations;
    sample.constraint_active = cmd.diag.constraint_active;
    result.samples.push_back(std::move(sample));

    if (std::hypot(state.x - goal.x, state.y - goal.y) <= kGoalPositionTol &&
        std::abs(state.v) < kGoalSpeedTol) {
      result.reached_goal = true;
      break;
    }

    in_flight.push_back(Actuation{cmd.a_cmd, cmd.v_cmd, std::tan(cmd.delta_cmd)});
    const Actuation act = in_flight.front();
    in_flight.pop_front();

    for (int i = 0; i < kPlantSubsteps; ++i) {
      double accel = act.accel;
      if (scenario.mpc.output_mode == OutputMode::velocity_passthrough) {
        // subordinate speed servo: close the gap to v_cmd within one
        // controller period, saturated at the acceleration bounds
        accel = std::clamp((act.v_cmd - state.v) / ts, scenario.vehicle.a_min,
                           scenario.vehicle.a_max);
      }
      state = nonlinear_step(state, ControlInput{accel, act.tan_delta}, dt, scenario.vehicle);
    }
  }
  return result;
}

Metrics compute_metrics(const SimResult& result, const Trajectory& trajectory) {
  Metrics m;
  if (result.samples.empty()) {
    return m;
  }

  double sum_sq = 0.0;
  for (const SimSample& sample : result.samples) {
    const double cte =
        project_to_path(trajectory, Eigen::Vector2d(sample.state.x, sample.state.y))
            .signed_offset;
    sum_sq += cte * cte;
    if (std::abs(cte) > m.max_cross_track) {
      m.max_cross_track = std::abs(cte);
      m.max_overshoot = cte;
    }
    if (sample.constraint_active) {
      ++m.steps_at_constraint;
    }
  }
  m.rms_cross_track = std::sqrt(sum_sq / static_cast<double>(result.samples.size()));

  const SimSample& last = result.samples.back();
  const Waypoint& goal = trajectory.waypoints().back();
  m.final_position_error = std::hypot(last.state.x - goal.x, last.state.y - goal.y);
  m.final_speed = std::abs(last.state.v);

  for (std::size_t i = 1; i < result.samples.size(); ++i) {
    const double rate = std::abs(result.samples[i].command.delta_cmd -
                                 result.samples[i - 1].command.delta_cmd);
    m.max_steering_rate = std::max(m.max_steering_rate, rate);
  }
  return m;
}

Scenario make_s_curve_scenario(double lateral_offset, double transition_length,
                               double cruise_speed) {
  if (!(lateral_offset >= 0.0) || !std::isfinite(lateral_offset)) {
    throw ConfigError("s_curve.lateral_offset must be >= 0");
  }
  if (!(transition_length > 0.0) || !std::isfinite(transition_length)) {
    throw ConfigError("s_curve.transition_length must be > 0");
  }
  if (!(cruise_speed > 0.0)) {
    throw ConfigError("s_curve.cruise_speed must be > 0");
  }
  if (cruise_speed >= 10.0) {
    throw ConfigError("s_curve.cruise_speed must stay below 10 m/s for the kinematic model");
  }

  const double lead = 5.0;  // straight run-in/run-out [m]
  const double x_end = lead + transition_length + lead;

  const auto profile_y = [&](double x) {
    if (x <= lead) {
      return 0.0;
    }
    if (x >= lead + transition_length) {
      return lateral_offset;
    }
    const double u = (x - lead) / transition_length;
    return lateral_offset * u * u * (3.0 - 2.0 * u);
  };
  const auto profile_slope = [&](double x) {
    if (x <= lead || x >= lead + transition_length) {
      return 0.0;
    }
    const double u = (x - lead) / transition_length;
    return lateral_offset * 6.0 * u * (1.0 - u) / transition_length;
  };

  // arc length along the profile on a millimeter grid
  const double fine = 1e-3;
  const std::size_t n_fine = static_cast<std::size_t>(std::ceil(x_end / fine)) + 1;
  std::vector<double> grid_x(n_fine);
  std::vector<double> grid_s(n_fine);
  grid_x[0] = 0.0;
  grid_s[0] = 0.0;
  for (std::size_t i = 1; i < n_fine; ++i) {
    grid_x[i] = std::min(static_cast<double>(i) * fine, x_end);
    grid_s[i] = grid_s[i - 1] + std::hypot(grid_x[i] - grid_x[i - 1],
                                           profile_y(grid_x[i]) - profile_y(grid_x[i - 1]));
  }
  const double total = grid_s.back();

  // waypoint stations every 0.5 m of arc; fold a short tail into the
  // last gap so the coarse-input spacing contract holds
  std::vector<double> stations;
  for (double s = 0.0; s < total - 1e-9; s += 0.5) {
    stations.push_back(s);
  }
  if (total - stations.back() < kMinWaypointGap) {
    stations.back() = total;
  } else {
    stations.push_back(total);
  }

  const double ramp = std::max(4.0, cruise_speed * cruise_speed);  // [m]
  const auto speed_at = [&](double s) {
    const double frac = std::min({s / ramp, (total - s) / ramp, 1.0});
    return cruise_speed * std::max(0.0, frac);
  };

  std::vector<Waypoint> wps;
  wps.reserve(stations.size());
  std::size_t cursor = 1;
  for (double s : stations) {
    while (cursor + 1 < n_fine && grid_s[cursor] < s) {
      ++cursor;
    }
    const double seg = grid_s[cursor] - grid_s[cursor - 1];
    const double frac = seg > 0.0 ? std::clamp((s - grid_s[cursor - 1]) / seg, 0.0, 1.0) : 0.0;
    const double x = grid_x[cursor - 1] + frac * (grid_x[cursor] - grid_x[cursor - 1]);

    Waypoint w;
    w.x = x;
    w.y = profile_y(x);
    w.theta = std::atan(profile_slope(x));
    w.v = speed_at(s);
    wps.push_back(w);
  }

  // start on the second waypoint: at the very first one the reference
  // speed is zero and the speed-integrated preview would never advance
  const Waypoint& start = wps[1];
  VehicleState init;
  init.x = start.x;
  init.y = start.y;
  init.v = 0.0;
  init.theta = start.theta;

  const double duration = 15.0 + 4.0 * total / cruise_speed;
  return Scenario{Trajectory(std::move(wps)), init, VehicleParams{}, MpcConfig{},
                  duration, 1};
}

}  // namespace parkmpc
