#include "neumann/error.hpp"
#include "neumann/truncate.hpp"

#include "test_fields.hpp"

#include <gtest/gtest.h>

using namespace neumann;

namespace {

const NeumannComplex& generic_complex() {
  static const NeumannComplex cx = build_complex(fixtures::lambda17_generic());
  return cx;
}

int first_cusped_domain(const NeumannComplex& cx) {
  for (std::size_t d = 0; d < cx.domains.size(); ++d) {
    for (const auto& c : cx.domains[d].cusps) {
      if (c.confirmed) return static_cast<int>(d);
    }
  }
  return -1;
}

}  // namespace

TEST(Truncate, RegularDomainUnchanged) {
  const auto cx = build_complex(fixtures::separable());
  const auto t = truncate_domain(cx, 0, 0.9);
  EXPECT_TRUE(t.unchanged());
  EXPECT_NEAR(std::abs(signed_area(t.geometry.outer)), kPi * kPi, 1e-6);
}

TEST(Truncate, LevelLinesMeetBoundaryPerpendicularly) {
  const auto& cx = generic_complex();
  const int d = first_cusped_domain(cx);
  ASSERT_GE(d, 0);
  const auto t = truncate_domain(cx, d, 0.9);
  EXPECT_FALSE(t.unchanged());
  ASSERT_FALSE(t.end_angles.empty());
  for (double a : t.end_angles) EXPECT_NEAR(a, kPi / 2, 2.0 * kPi / 180);
  // Points of the level lines sit on the requested level.
  const auto& dom = cx.domains[d];
  for (const auto* g : {&t.gamma_plus, &t.gamma_minus}) {
    if (g->empty()) continue;
    const double target = 0.9 * (g == &t.gamma_plus ? cx.criticals[dom.max_point].value : cx.criticals[dom.min_point].value);
    for (const auto& p : *g) EXPECT_NEAR(cx.field.value(p), target, 1e-8);
  }
}

TEST(Truncate, RemovedAreaShrinksAsTApproachesOne) {
  const auto& cx = generic_complex();
  const int d = first_cusped_domain(cx);
  double previous = 0.0;
  for (double t : {0.8, 0.9, 0.99}) {
    const double area = std::abs(signed_area(truncate_domain(cx, d, t).geometry.outer));
    EXPECT_GT(area, previous);
    previous = area;
  }
  EXPECT_LT(previous, cx.domains[d].area);
}

TEST(Truncate, NormalisedLengthDecreases) {
  const auto& cx = generic_complex();
  const int d = first_cusped_domain(cx);
  const auto decay = cusp_length_decay(cx, d, {0.9, 0.99, 0.999});
  ASSERT_EQ(decay.size(), 3u);
  for (std::size_t i = 0; i < decay.size(); ++i) {
    const auto& c = decay[i];
    if (c.length_plus > 0) {
      EXPECT_NEAR(c.normalized_plus, c.length_plus / std::sqrt(1 - c.t), 1e-12);
    }
    if (i == 0) continue;
    const auto& p = decay[i - 1];
    if (c.length_plus > 0) {
      EXPECT_LT(c.normalized_plus, p.normalized_plus);
    }
    if (c.length_minus > 0) {
      EXPECT_LT(c.normalized_minus, p.normalized_minus);
    }
  }
}

TEST(Truncate, Preconditions) {
  const auto& cx = generic_complex();
  const int d = first_cusped_domain(cx);
  EXPECT_THROW(truncate_domain(cx, d, 1.0), Error);
  EXPECT_THROW(truncate_domain(cx, d, 0.0), Error);
  const auto sep = build_complex(fixtures::separable());
  EXPECT_THROW(cusp_length_decay(sep, 0, {0.9}), Error);
}

TEST(Truncate, TruncatedMeshCarriesLevelLineMarkers) {
  const auto& cx = generic_complex();
  const int d = first_cusped_domain(cx);
  MeshOptions o;
  o.h = 0.1;
  o.truncate = 0.9;
  const TriMesh m = mesh_domain(cx, d, o);
  ASSERT_TRUE(m.t);
  EXPECT_EQ(*m.t, 0.9);
  int level = 0;
  for (const auto& e : m.boundary_edges) {
    level += e.marker == BoundaryMarker::GammaPlus || e.marker == BoundaryMarker::GammaMinus;
  }
  EXPECT_GT(level, 0);
  EXPECT_GE(m.min_angle(), 15.0 * kPi / 180);
}
