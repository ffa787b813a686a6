#include "neumann/critical.hpp"
#include "neumann/error.hpp"

#include "test_fields.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

using namespace neumann;

namespace {

struct IndexCount {
  int positive = 0;
  int negative = 0;
};

// Winding of grad f around every cell of an n x n lattice: +1 cells hold an
// extremum, -1 cells a saddle. Independent of the Newton search.
IndexCount gradient_index_scan(const MorseField& f, int n) {
  auto angle = [&](int i, int j) {
    const Vec2 g = f.gradient({kTwoPi * (i + 0.5) / n, kTwoPi * (j + 0.5) / n});
    return std::atan2(g.y(), g.x());
  };
  auto turn = [](double a, double b) {
    double d = b - a;
    while (d > kPi) d -= kTwoPi;
    while (d < -kPi) d += kTwoPi;
    return d;
  };
  IndexCount c;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double a0 = angle(i, j), a1 = angle(i + 1, j), a2 = angle(i + 1, j + 1), a3 = angle(i, j + 1);
      const double w = turn(a0, a1) + turn(a1, a2) + turn(a2, a3) + turn(a3, a0);
      const int idx = static_cast<int>(std::lround(w / kTwoPi));
      if (idx > 0) c.positive += idx;
      if (idx < 0) c.negative -= idx;
    }
  }
  return c;
}

}  // namespace

TEST(Critical, SeparableExactLocations) {
  const auto cps = find_critical_points(fixtures::separable());
  ASSERT_EQ(cps.size(), 4u);
  auto expect_at = [&](Vec2 x, CriticalKind kind) {
    const int i = find_critical_near(cps, x, 1e-8);
    ASSERT_GE(i, 0) << x.transpose();
    EXPECT_EQ(cps[i].kind, kind);
  };
  expect_at({0, 0}, CriticalKind::Maximum);
  expect_at({kPi, kPi}, CriticalKind::Minimum);
  expect_at({0, kPi}, CriticalKind::Saddle);
  expect_at({kPi, 0}, CriticalKind::Saddle);
  for (const auto& c : cps) {
    EXPECT_NEAR(std::abs(c.hess_eigenvalues[0]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(c.hess_eigenvalues[1]), 1.0, 1e-12);
  }
}

TEST(Critical, SortedByKindThenPosition) {
  const auto cps = find_critical_points(fixtures::lambda17());
  for (std::size_t i = 1; i < cps.size(); ++i) {
    const auto& a = cps[i - 1];
    const auto& b = cps[i];
    EXPECT_TRUE(a.kind < b.kind || (a.kind == b.kind && (a.position.x() < b.position.x() ||
                                                         (a.position.x() == b.position.x() && a.position.y() <= b.position.y()))));
  }
}

TEST(Critical, InventoryMatchesGradientIndexScan) {
  for (const auto& f : {fixtures::lambda17(), fixtures::lambda17_generic()}) {
    const auto cps = find_critical_points(f);
    const auto counts = count_kinds(cps);
    const IndexCount scan = gradient_index_scan(f, 512);
    EXPECT_EQ(counts.minima + counts.maxima, scan.positive);
    EXPECT_EQ(counts.saddles, scan.negative);
    EXPECT_TRUE(euler_check(cps));
    for (const auto& c : cps) EXPECT_LT(f.gradient(c.position).norm(), 1e-10);
  }
}

TEST(Critical, ClassificationFromHessianSigns) {
  const MorseField f = fixtures::lambda17();
  for (const auto& c : find_critical_points(f)) {
    const Mat2 H = f.hessian(c.position);
    const double det = H.determinant();
    if (det < 0) {
      EXPECT_EQ(c.kind, CriticalKind::Saddle);
    } else {
      EXPECT_EQ(c.kind, H.trace() < 0 ? CriticalKind::Maximum : CriticalKind::Minimum);
    }
    EXPECT_NEAR(c.value, f.value(c.position), 1e-15);
  }
}

TEST(Critical, ProportionalHessianFlagged) {
  // Hessian of cos x + cos y at an extremum is -I.
  const auto c = classify_critical_point(fixtures::separable(), {0, 0});
  EXPECT_TRUE(c.hess_proportional);
  EXPECT_EQ(c.kind, CriticalKind::Maximum);
}

TEST(Critical, DegenerateFieldRejected) {
  // cos x has whole lines of critical points.
  EXPECT_THROW(
      {
        try {
          find_critical_points(MorseField({{1.0, 1, 0, 0.0}}));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NotMorse);
          throw;
        }
      },
      Error);
}

TEST(Critical, FindNear) {
  const auto cps = find_critical_points(fixtures::separable());
  EXPECT_EQ(find_critical_near(cps, {1.0, 1.0}, 0.1), -1);
  EXPECT_GE(find_critical_near(cps, {kTwoPi - 1e-9, 1e-9}, 1e-6), 0);
}
