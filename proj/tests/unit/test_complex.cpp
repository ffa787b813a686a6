#include "neumann/complex.hpp"
#include "neumann/error.hpp"

#include "test_fields.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace neumann;

namespace {

const NeumannComplex& separable_complex() {
  static const NeumannComplex cx = build_complex(fixtures::separable());
  return cx;
}

const NeumannComplex& lambda17_complex() {
  static const NeumannComplex cx = build_complex(fixtures::lambda17());
  return cx;
}

const NeumannComplex& generic_complex() {
  static const NeumannComplex cx = build_complex(fixtures::lambda17_generic());
  return cx;
}

}  // namespace

TEST(Complex, SeparableSkeleton) {
  const auto& cx = separable_complex();
  EXPECT_EQ(cx.criticals.size(), 4u);
  EXPECT_EQ(cx.lines.size(), 8u);
  EXPECT_EQ(cx.domains.size(), 4u);
  EXPECT_EQ(cx.euler_characteristic(), 0);
  EXPECT_TRUE(cx.morse_smale);
  for (std::size_t i = 0; i < cx.criticals.size(); ++i) EXPECT_EQ(degree(cx, static_cast<int>(i)), 4);
  for (const auto& d : cx.domains) {
    EXPECT_EQ(d.classification, DomainClass::Regular);
    EXPECT_NEAR(d.area, kPi * kPi, 1e-6);
    EXPECT_EQ(d.saddles.size(), 2u);
    EXPECT_TRUE(d.crack_lines.empty());
    EXPECT_EQ(d.boundary.size(), 4u);
    // Squares: four corners, side pi.
    EXPECT_NEAR(polyline_length(d.outline) + (d.outline.back() - d.outline.front()).norm(), 4 * kPi, 1e-5);
  }
}

TEST(Complex, SeparableRightAngles) {
  const auto& cx = separable_complex();
  for (std::size_t i = 0; i < cx.criticals.size(); ++i) {
    for (double a : angles_at(cx, static_cast<int>(i))) EXPECT_NEAR(a, kPi / 2, 1e-6);
  }
}

TEST(Complex, Lambda17FacesTileTheTorus) {
  const auto& cx = lambda17_complex();
  EXPECT_EQ(cx.euler_characteristic(), 0);
  EXPECT_TRUE(cx.morse_smale);
  EXPECT_TRUE(is_morse_smale(cx));
  double total = 0.0;
  for (const auto& d : cx.domains) {
    total += d.area;
    EXPECT_EQ(cx.criticals[d.max_point].kind, CriticalKind::Maximum);
    EXPECT_EQ(cx.criticals[d.min_point].kind, CriticalKind::Minimum);
    EXPECT_EQ(classify_domain(cx, d), d.classification);
  }
  EXPECT_NEAR(total, 4 * kPi * kPi, 1e-4);
}

TEST(Complex, InteriorPointFlowsToFaceExtrema) {
  const auto& cx = lambda17_complex();
  const StopRule stop{cx.criticals, -1, {}};
  for (const auto& d : cx.domains) {
    EXPECT_NE(winding_number(d.outline, d.interior_point), 0);
    const auto down = integrate_flow(cx.field, d.interior_point, FlowDirection::Forward, stop);
    const auto up = integrate_flow(cx.field, d.interior_point, FlowDirection::Backward, stop);
    EXPECT_EQ(down.end_critical, d.min_point);
    EXPECT_EQ(up.end_critical, d.max_point);
  }
}

TEST(Complex, SaddleAnglesAreRight) {
  const auto& cx = lambda17_complex();
  for (std::size_t i = 0; i < cx.criticals.size(); ++i) {
    const auto a = angles_at(cx, static_cast<int>(i));
    double sum = 0.0;
    for (double x : a) sum += x;
    EXPECT_NEAR(sum, kTwoPi, 1e-9);
    if (cx.criticals[i].kind != CriticalKind::Saddle) continue;
    ASSERT_EQ(a.size(), 4u);
    for (double x : a) EXPECT_NEAR(x, kPi / 2, 2.0 * kPi / 180);
  }
}

TEST(Complex, EveryLineTwiceOnFaceBoundaries) {
  const auto& cx = generic_complex();
  std::vector<int> uses(2 * cx.lines.size(), 0);
  for (const auto& d : cx.domains) {
    for (const auto& he : d.boundary) ++uses[he.half_edge()];
  }
  for (int u : uses) EXPECT_EQ(u, 1);
}

TEST(Complex, CuspExponentMatchesHessianRatio) {
  const auto& cx = generic_complex();
  int confirmed = 0;
  for (const auto& d : cx.domains) {
    for (const auto& c : d.cusps) {
      if (!c.confirmed) continue;
      ++confirmed;
      Eigen::SelfAdjointEigenSolver<Mat2> es(cx.field.hessian(cx.criticals[c.critical].position));
      const double a = std::abs(es.eigenvalues()[0]), b = std::abs(es.eigenvalues()[1]);
      const double ratio = std::max(a, b) / std::min(a, b);
      EXPECT_NEAR(c.exponent, ratio, 1e-9);
      EXPECT_NEAR(c.fitted_exponent, ratio, 0.05 * ratio);
      EXPECT_GE(c.r_squared, 0.99);
      EXPECT_LT(c.meeting_angle, 5.0 * kPi / 180);
    }
  }
  EXPECT_GT(confirmed, 0);
}

TEST(Complex, CuspExponentNeedsDistinctEigenvalues) {
  const auto c = classify_critical_point(fixtures::separable(), {0, 0});
  EXPECT_THROW(cusp_exponent(c), Error);
}

TEST(Complex, Names) {
  EXPECT_STREQ(to_string(DomainClass::Regular), "regular");
  EXPECT_STREQ(to_string(DomainClass::Cracked), "cracked");
}
