#include "neumann/geometry.hpp"

#include <gtest/gtest.h>

using namespace neumann;

TEST(Geometry, WrapCoordIntoFundamentalDomain) {
  EXPECT_DOUBLE_EQ(wrap_coord(-1.0), kTwoPi - 1.0);
  EXPECT_DOUBLE_EQ(wrap_coord(kTwoPi + 0.5), 0.5);
  EXPECT_EQ(wrap_coord(kTwoPi), 0.0);
  for (double x : {-100.0, -1e-17, 3.0, 77.7}) {
    const double w = wrap_coord(x);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, kTwoPi);
  }
}

TEST(Geometry, TorusDeltaIsShortestDisplacement) {
  const Vec2 a(0.1, 6.2);
  const Vec2 b(6.2, 0.1);
  const Vec2 d = torus_delta(a, b);
  EXPECT_NEAR(d.x(), 6.1 - kTwoPi, 1e-12);
  EXPECT_NEAR(d.y(), kTwoPi - 6.1, 1e-12);
  EXPECT_NEAR(torus_distance(a, b), std::hypot(kTwoPi - 6.1, kTwoPi - 6.1), 1e-12);
  EXPECT_NEAR((nearest_lift(b, a) - a - d).norm(), 0.0, 1e-12);
}

TEST(Geometry, PolylineMeasures) {
  const Polyline square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_DOUBLE_EQ(signed_area(square), 4.0);
  const Polyline reversed(square.rbegin(), square.rend());
  EXPECT_DOUBLE_EQ(signed_area(reversed), -4.0);
  EXPECT_DOUBLE_EQ(polyline_length(square), 6.0);
  EXPECT_EQ(winding_number(square, {1, 1}), 1);
  EXPECT_EQ(winding_number(reversed, {1, 1}), -1);
  EXPECT_EQ(winding_number(square, {3, 1}), 0);
}

TEST(Geometry, SegmentDistance) {
  EXPECT_DOUBLE_EQ(point_segment_distance({1, 1}, {0, 0}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 0}, {0, 0}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({0, 0}, {0, 0}, {0, 0}), 0.0);
}

TEST(Geometry, ResampleKeepsEndsAndSpacing) {
  // Quarter circle of radius 1; arclength pi/2.
  Polyline arc;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.5 * kPi * i / 1000;
    arc.emplace_back(std::cos(t), std::sin(t));
  }
  const Polyline r = resample_uniform(arc, 0.1);
  EXPECT_EQ((r.front() - arc.front()).norm(), 0.0);
  EXPECT_EQ((r.back() - arc.back()).norm(), 0.0);
  // Equal steps no longer than requested.
  const double step = (r[1] - r[0]).norm();
  EXPECT_LE(step, 0.1);
  EXPECT_GT(step, 0.09);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_NEAR((r[i] - r[i - 1]).norm(), step, 1e-5);
  const Vec2 mid = point_at_arclength(arc, polyline_length(arc) / 2);
  EXPECT_NEAR(mid.x(), std::sqrt(0.5), 1e-6);
  EXPECT_NEAR(mid.y(), std::sqrt(0.5), 1e-6);
  EXPECT_EQ((point_at_arclength(arc, 10.0) - arc.back()).norm(), 0.0);
}
