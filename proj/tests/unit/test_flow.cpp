#include "neumann/error.hpp"
#include "neumann/flow.hpp"

#include "test_fields.hpp"

#include <gtest/gtest.h>

using namespace neumann;

TEST(Flow, SeparableTrajectoryKeepsFirstIntegral) {
  // For x' = sin x, y' = sin y the ratio tan(y/2) / tan(x/2) is conserved.
  const MorseField f = fixtures::separable();
  const auto cps = find_critical_points(f);
  const StopRule stop{cps, -1, {}};
  const Vec2 x0(1.0, 2.0);
  const FlowLine line = integrate_flow(f, x0, FlowDirection::Forward, stop);
  ASSERT_GE(line.end_critical, 0);
  EXPECT_EQ(cps[line.end_critical].kind, CriticalKind::Minimum);
  const double c0 = std::tan(x0.y() / 2) / std::tan(x0.x() / 2);
  for (const auto& p : line.raw) {
    if (std::abs(p.x() - kPi) < 1e-2 || std::abs(p.y() - kPi) < 1e-2) continue;
    EXPECT_NEAR(std::tan(p.y() / 2) / std::tan(p.x() / 2), c0, 1e-6 * std::max(1.0, std::abs(c0)));
  }
  EXPECT_NEAR((line.end_lift - Vec2(kPi, kPi)).norm(), 0.0, 1e-9);
  // f decreases monotonically along forward flow.
  for (std::size_t i = 1; i < line.samples.size(); ++i) {
    EXPECT_LE(f.value(line.samples[i]), f.value(line.samples[i - 1]) + 1e-12);
  }
}

TEST(Flow, SeparableSaddleLinesAreStraight) {
  const MorseField f = fixtures::separable();
  const auto cps = find_critical_points(f);
  const int s = find_critical_near(cps, {kPi, 0}, 1e-8);
  ASSERT_GE(s, 0);
  const auto lines = trace_neumann_lines(f, cps, s);
  int to_max = 0, to_min = 0;
  for (const auto& l : lines) {
    EXPECT_EQ(l.saddle, s);
    EXPECT_EQ(l.start(), s);
    EXPECT_NEAR(l.path.length, kPi, 1e-6);
    const auto kind = cps[l.end()].kind;
    to_max += kind == CriticalKind::Maximum;
    to_min += kind == CriticalKind::Minimum;
    // Uphill lines run along y = 0 and downhill lines along x = pi.
    for (const auto& p : l.samples()) {
      if (kind == CriticalKind::Maximum) {
        EXPECT_NEAR(p.y(), 0.0, 1e-8);
      } else {
        EXPECT_NEAR(p.x(), kPi, 1e-8);
      }
    }
  }
  EXPECT_EQ(to_max, 2);
  EXPECT_EQ(to_min, 2);
}

TEST(Flow, Lambda17SaddlesReachExtrema) {
  const MorseField f = fixtures::lambda17();
  const auto cps = find_critical_points(f);
  for (std::size_t s = 0; s < cps.size(); ++s) {
    if (cps[s].kind != CriticalKind::Saddle) continue;
    for (const auto& l : trace_neumann_lines(f, cps, static_cast<int>(s))) {
      ASSERT_GE(l.end(), 0);
      EXPECT_TRUE(cps[l.end()].is_extremum());
      // The lift of the end point agrees with the recorded winding.
      const Vec2 expect = cps[l.end()].position + kTwoPi * Vec2(l.path.end_winding[0], l.path.end_winding[1]);
      EXPECT_LT((l.path.end_lift - expect).norm(), 1e-9);
      EXPECT_LT((l.samples().back() - l.path.end_lift).norm(), 1e-9);
    }
  }
}

TEST(Flow, SamplesAreUniform) {
  const MorseField f = fixtures::lambda17();
  const auto cps = find_critical_points(f);
  const int s = static_cast<int>(std::find_if(cps.begin(), cps.end(), [](const auto& c) { return !c.is_extremum(); }) - cps.begin());
  const auto lines = trace_neumann_lines(f, cps, s);
  const auto& pts = lines[0].samples();
  ASSERT_GT(pts.size(), 3u);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) EXPECT_NEAR((pts[i] - pts[i - 1]).norm(), 1e-3, 2e-5);
}

TEST(Flow, NotASaddleRejected) {
  const MorseField f = fixtures::separable();
  const auto cps = find_critical_points(f);
  const int m = find_critical_near(cps, {0, 0}, 1e-8);
  EXPECT_THROW(trace_neumann_lines(f, cps, m), Error);
}
