#pragma once

#include <cmath>
#include <numbers>

namespace parkmpc {

/// Wraps an angle to the half-open interval (-pi, pi]. In-range values
/// pass through unchanged, so a zero-increment update keeps the exact
/// bit pattern.
inline double wrap_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  if (angle > -pi && angle <= pi) {
    return angle;
  }
  double a = std::fmod(angle + pi, 2.0 * pi);
  if (a <= 0.0) {
    a += 2.0 * pi;
  }
  return a - pi;
}

/// Shortest-arc difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace parkmpc
