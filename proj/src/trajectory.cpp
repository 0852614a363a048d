#include "parkmpc/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "parkmpc/angles.hpp"
#include "parkmpc/errors.hpp"

namespace parkmpc {
namespace {

constexpr double kMinPointDistance = 1e-6;  // [m]

double lagrange_cubic(const std::array<double, 4>& t, const std::array<double, 4>& y, double at) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double basis = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) {
        basis *= (at - t[j]) / (t[i] - t[j]);
      }
    }
    acc += y[i] * basis;
  }
  return acc;
}

}  // namespace

Trajectory::Trajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) {
    throw ConfigError("trajectory needs at least 2 waypoints");
  }
  arclength_.resize(waypoints_.size());
  arclength_[0] = 0.0;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const Waypoint& w = waypoints_[i];
    if (!(std::isfinite(w.x) && std::isfinite(w.y) && std::isfinite(w.theta) &&
          std::isfinite(w.v))) {
      throw ConfigError("trajectory waypoint has a non-finite field");
    }
    if (w.v < 0.0) {
      throw ConfigError("trajectory waypoint speed must be >= 0");
    }
    if (i > 0) {
      const double d = std::hypot(w.x - waypoints_[i - 1].x, w.y - waypoints_[i - 1].y);
      if (d <= kMinPointDistance) {
        throw ConfigError("trajectory has coincident consecutive waypoints");
      }
      arclength_[i] = arclength_[i - 1] + d;
    }
  }
}

Waypoint Trajectory::sample(double s) const {
  if (s <= arclength_.front()) {
    return waypoints_.front();
  }
  if (s >= arclength_.back()) {
    return waypoints_.back();
  }
  const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  const std::size_t hi = static_cast<std::size_t>(it - arclength_.begin());
  const std::size_t lo = hi - 1;
  const double span = arclength_[hi] - arclength_[lo];
  const double frac = (s - arclength_[lo]) / span;

  const Waypoint& a = waypoints_[lo];
  const Waypoint& b = waypoints_[hi];
  Waypoint out;
  out.x = a.x + frac * (b.x - a.x);
  out.y = a.y + frac * (b.y - a.y);
  out.v = a.v + frac * (b.v - a.v);
  out.theta = wrap_angle(a.theta + frac * angle_diff(b.theta, a.theta));
  return out;
}

std::size_t find_nearest_waypoint(const Trajectory& traj, const Eigen::Vector2d& position) {
  if (!position.allFinite()) {
    throw ConfigError("find_nearest_waypoint: non-finite query position");
  }
  const auto& pts = traj.waypoints();
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i].x - position.x();
    const double dy = pts[i].y - position.y();
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

std::size_t cubic_stencil_start(std::size_t traj_size, std::size_t nearest) {
  if (traj_size < 4) {
    throw ConfigError("cubic resampling needs at least 4 waypoints");
  }
  const std::size_t behind = nearest == 0 ? 0 : nearest - 1;
  return std::min(behind, traj_size - 4);
}

Trajectory resample_cubic(const Trajectory& traj, std::size_t nearest_index, double spacing) {
  if (!(spacing > 0.0)) {
    throw ConfigError("resample spacing must be > 0");
  }
  const auto& pts = traj.waypoints();
  const std::size_t lo = cubic_stencil_start(pts.size(), nearest_index);

  std::array<double, 4> t{};
  std::array<double, 4> xs{};
  std::array<double, 4> ys{};
  std::array<double, 4> ths{};
  std::array<double, 4> vs{};
  for (int i = 0; i < 4; ++i) {
    const Waypoint& w = pts[lo + static_cast<std::size_t>(i)];
    xs[i] = w.x;
    ys[i] = w.y;
    vs[i] = w.v;
    // unwrap headings so the fit never crosses the +/-pi seam
    ths[i] = i == 0 ? w.theta : ths[i - 1] + angle_diff(w.theta, ths[i - 1]);
    t[i] = i == 0 ? 0.0 : t[i - 1] + std::hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1]);
  }

  std::vector<double> params;
  const double span = t[3];
  for (double s = 0.0; s < span - 1e-12; s += spacing) {
    params.push_back(s);
  }
  params.push_back(span);

  std::vector<Waypoint> out;
  out.reserve(params.size());
  for (double s : params) {
    Waypoint w;
    w.x = lagrange_cubic(t, xs, s);
    w.y = lagrange_cubic(t, ys, s);
    w.theta = wrap_angle(lagrange_cubic(t, ths, s));
    w.v = std::max(0.0, lagrange_cubic(t, vs, s));
    if (!out.empty() && std::hypot(w.x - out.back().x, w.y - out.back().y) <= kMinPointDistance) {
      continue;
    }
    out.push_back(w);
  }
  return Trajectory(std::move(out));
}

Eigen::VectorXd ReferencePreview::stacked() const {
  Eigen::VectorXd r(rows.rows() * 3);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    r.segment<3>(3 * i) = rows.row(i).transpose();
  }
  return r;
}

ReferencePreview build_reference_preview(const Trajectory& resampled, const VehicleState& state,
                                         int horizon, double sample_time, PreviewMode mode) {
  if (horizon < 1) {
    throw ConfigError("preview horizon must be >= 1");
  }
  const double end = resampled.length();
  const std::size_t nearest =
      find_nearest_waypoint(resampled, Eigen::Vector2d(state.x, state.y));
  const double s0 = resampled.arclength()[nearest];

  ReferencePreview preview;
  preview.rows.resize(horizon, 3);
  preview.arc_lengths.resize(horizon);
  preview.clamped.assign(static_cast<std::size_t>(horizon), 0);

  double s = s0;
  for (int i = 0; i < horizon; ++i) {
    if (mode == PreviewMode::advancing) {
      s += resampled.sample(s).v * sample_time;
    }
    const bool at_end = s >= end - 1e-9;
    const Waypoint ref = at_end ? resampled.waypoints().back() : resampled.sample(s);
    preview.rows(i, 0) = ref.y;
    preview.rows(i, 1) = at_end ? 0.0 : ref.v;
    preview.rows(i, 2) = state.theta + angle_diff(ref.theta, state.theta);
    preview.arc_lengths(i) = s;
    preview.clamped[static_cast<std::size_t>(i)] = at_end ? 1 : 0;
  }
  return preview;
}

}  // namespace parkmpc
