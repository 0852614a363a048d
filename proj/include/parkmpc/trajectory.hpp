#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "parkmpc/vehicle_model.hpp"

namespace parkmpc {

/// One planner reference point in the global frame.
struct Waypoint {
  double x{0.0};      // [m]
  double y{0.0};      // [m]
  double theta{0.0};  // heading [rad]
  double v{0.0};      // target longitudinal speed [m/s], >= 0
};

/// Ordered waypoint sequence with cumulative arc length. Construction
/// validates the basic invariants: at least two points, finite fields,
/// nonnegative speeds, and no coincident consecutive points.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Waypoint> waypoints);

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  const std::vector<double>& arclength() const { return arclength_; }
  std::size_t size() const { return waypoints_.size(); }
  double length() const { return arclength_.back(); }

  /// Reference interpolated at arc length s (clamped to [0, length]).
  /// Heading is interpolated along the shortest arc.
  Waypoint sample(double s) const;

 private:
  std::vector<Waypoint> waypoints_;
  std::vector<double> arclength_;
};

/// Index of the waypoint closest to `position`; ties resolve to the
/// lower index.
std::size_t find_nearest_waypoint(const Trajectory& traj, const Eigen::Vector2d& position);

/// First index of the four-point interpolation stencil around `nearest`:
/// one point behind and three ahead, shifted inward at the ends so four
/// points always exist.
std::size_t cubic_stencil_start(std::size_t traj_size, std::size_t nearest);

/// Densifies the trajectory over the four-point stencil around
/// `nearest_index` with a cubic fit per channel, sampled every `spacing`
/// meters of the stencil chord parameter. Headings are unwrapped before
/// fitting; speeds are clamped at zero.
Trajectory resample_cubic(const Trajectory& traj, std::size_t nearest_index, double spacing);

enum class PreviewMode { advancing, hold };

/// Horizon reference table. Row i holds (y_ref, v_ref, theta_ref) for
/// prediction step i+1; stacking the rows gives the reference vector the
/// optimizer consumes.
struct ReferencePreview {
  Eigen::Matrix<double, Eigen::Dynamic, 3> rows;
  Eigen::VectorXd arc_lengths;        // preview arc length per row
  std::vector<std::uint8_t> clamped;  // row pinned to the trajectory end

  Eigen::VectorXd stacked() const;
};

/// Builds the horizon reference. In `advancing` mode the preview arc
/// length integrates the local reference speed tick by tick; in `hold`
/// mode every row repeats the reference at the point nearest the
/// vehicle. Rows past the trajectory end pin to the final waypoint with
/// zero reference speed. Reference headings are continuity-adjusted
/// against the vehicle heading so the optimizer never sees a 2*pi jump.
ReferencePreview build_reference_preview(const Trajectory& resampled, const VehicleState& state,
                                         int horizon, double sample_time,
                                         PreviewMode mode = PreviewMode::advancing);

}  // namespace parkmpc
