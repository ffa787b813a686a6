#include "neumann/error.hpp"
#include "neumann/mesh.hpp"

#include "test_fields.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace neumann;

namespace {

const Polyline kSquare{{0, 0}, {kPi, 0}, {kPi, kPi}, {0, kPi}};

// Every edge is used by one or two triangles; edges used once form the boundary.
void expect_conforming(const TriMesh& m) {
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : m.triangles) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    EXPECT_GT(cross(b - a, c - a), 0.0);
    for (int k = 0; k < 3; ++k) {
      const int u = t[k], v = t[(k + 1) % 3];
      ++uses[{std::min(u, v), std::max(u, v)}];
    }
  }
  std::size_t once = 0;
  for (const auto& [e, n] : uses) {
    EXPECT_LE(n, 2);
    once += n == 1;
  }
  EXPECT_EQ(once, m.boundary_edges.size());
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

TEST(Mesh, SquareStructuredCount) {
  MeshOptions o;
  o.h = kPi / 16;
  const TriMesh m = mesh_polygon(kSquare, o);
  const double expected = 2.0 * 16 * 16;
  EXPECT_GT(m.triangles.size(), 0.7 * expected);
  EXPECT_LT(m.triangles.size(), 1.3 * expected);
  EXPECT_NEAR(m.area(), kPi * kPi, 1e-10);
  EXPECT_GE(m.min_angle(), 15.0 * kPi / 180);
  for (const auto& e : m.boundary_edges) EXPECT_EQ(e.marker, BoundaryMarker::Boundary);
  double perimeter = 0.0;
  for (const auto& e : m.boundary_edges) perimeter += (m.vertices[e.b] - m.vertices[e.a]).norm();
  EXPECT_NEAR(perimeter, 4 * kPi, 1e-10);
  expect_conforming(m);
}

TEST(Mesh, BoundaryEdgesHaveMeshOnTheLeft) {
  MeshOptions o;
  o.h = 0.3;
  const TriMesh m = mesh_polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, o);
  EXPECT_NEAR(m.area(), 3.0, 1e-12);
  for (const auto& e : m.boundary_edges) {
    bool found = false;
    for (const auto& t : m.triangles) {
      for (int k = 0; k < 3; ++k) found |= t[k] == e.a && t[(k + 1) % 3] == e.b;
    }
    EXPECT_TRUE(found);
  }
  expect_conforming(m);
}

TEST(Mesh, ClockwisePolygonRejected) {
  const Polyline cw(kSquare.rbegin(), kSquare.rend());
  EXPECT_THROW(mesh_polygon(cw, {}), Error);
}

TEST(Mesh, SeparableDomainIsTheSquare) {
  const auto cx = build_complex(fixtures::separable());
  MeshOptions o;
  o.h = 0.2;
  for (int d = 0; d < 4; ++d) {
    const TriMesh m = mesh_domain(cx, d, o);
    EXPECT_NEAR(m.area(), kPi * kPi, 1e-6);
    expect_conforming(m);
  }
}

TEST(Mesh, CuspGrading) {
  const auto cx = build_complex(fixtures::lambda17_generic());
  const int d = first_cusped_domain(cx);
  ASSERT_GE(d, 0);
  MeshOptions o;
  o.h = 0.1;
  const TriMesh m = mesh_domain(cx, d, o);
  EXPECT_LE(m.smallest_edge(), o.h / 32);
  expect_conforming(m);
  // The cut-off tip is thinner than the smallest element.
  EXPECT_NEAR(m.area(), cx.domains[d].area, 1e-3 * cx.domains[d].area);
}

TEST(Mesh, MarkerNames) {
  EXPECT_STREQ(to_string(BoundaryMarker::CrackLeft), "crack_left");
  EXPECT_STREQ(to_string(BoundaryMarker::GammaPlus), "gamma_plus");
}
