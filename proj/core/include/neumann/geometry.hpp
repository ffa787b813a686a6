#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace neumann {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Polyline = std::vector<Vec2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces a coordinate into [0, 2pi).
inline double wrap_coord(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

inline Vec2 wrap_point(const Vec2& p) { return {wrap_coord(p.x()), wrap_coord(p.y())}; }

/// Shortest displacement b - a on the flat torus, each component in [-pi, pi).
inline Vec2 torus_delta(const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  for (int i = 0; i < 2; ++i) d[i] -= kTwoPi * std::floor(d[i] / kTwoPi + 0.5);
  return d;
}

inline double torus_distance(const Vec2& a, const Vec2& b) { return torus_delta(a, b).norm(); }

/// The lift of `p` nearest to `near` in the universal cover.
inline Vec2 nearest_lift(const Vec2& p, const Vec2& near) { return near + torus_delta(near, p); }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Angle in [0, pi] between two undirected-or-directed vectors.
inline double angle_between(const Vec2& a, const Vec2& b) {
  return std::atan2(std::abs(cross(a, b)), a.dot(b));
}

double polyline_length(std::span<const Vec2> pts);

/// Signed area (positive for counter-clockwise) of a closed polygon.
double signed_area(std::span<const Vec2> poly);

/// Winding number of a closed polygon around `p`.
int winding_number(std::span<const Vec2> poly, const Vec2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Resamples a polyline at uniform arclength spacing; always keeps both ends.
Polyline resample_uniform(std::span<const Vec2> pts, double spacing);

/// Point at arclength `s` along the polyline (clamped to the ends).
Vec2 point_at_arclength(std::span<const Vec2> pts, double s);

}  // namespace neumann
