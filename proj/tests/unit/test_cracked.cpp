#include "neumann/cracked.hpp"
#include "neumann/error.hpp"
#include "neumann/fem.hpp"
#include "neumann/mesh.hpp"

#include "test_fields.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace neumann;

namespace {

const Vec2 kCenter(kPi / 2, kPi / 2);

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::AssertionFailed;
}

// Root of alpha(u) + slope on [a, b] by bisection.
double bisect(double slope, double k, double a, double b) {
  auto g = [&](double u) { return bump::alpha(u, k) + slope; };
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    ((g(a) < 0) == (g(m) < 0) ? a : b) = m;
  }
  return 0.5 * (a + b);
}

const CrackedReport& separable_crack() {
  static const CrackedReport r = verify_cracked(build_crack_perturbation(fixtures::separable(), kCenter, 0.3));
  return r;
}

}  // namespace

TEST(Crack, ThresholdFromBruteForceMaximum) {
  double peak = 0.0;
  for (int i = 1; i < 200000; ++i) peak = std::max(peak, std::abs(bump::alpha(i / 200000.0, 1.0)));
  EXPECT_NEAR(crack_threshold_amplitude(0.7), 0.7 / peak, 1e-8);
}

TEST(Crack, SeparableBaseGivesOneCrackedDomain) {
  const auto& r = separable_crack();
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.cracked_domains, 1);
  EXPECT_EQ(r.max_outside_difference, 0.0);
  ASSERT_GE(r.new_extremum, 0);
  ASSERT_GE(r.new_saddle, 0);
  EXPECT_EQ(r.complex.criticals[r.new_extremum].kind, CriticalKind::Maximum);
  EXPECT_EQ(degree(r.complex, r.new_extremum), 1);
  ASSERT_GE(r.crack_line, 0);
  EXPECT_EQ(r.complex.lines[r.crack_line].end(), r.new_extremum);
  EXPECT_EQ(r.complex.lines[r.crack_line].saddle, r.new_saddle);
  EXPECT_EQ(r.complex.criticals.size(), 6u);
  EXPECT_EQ(r.complex.euler_characteristic(), 0);
}

TEST(Crack, NewPointsMatchOneDimensionalModel) {
  // On the patch axis the perturbed slope is A + alpha(u); its zeros are the
  // new maximum (alpha decreasing) and saddle (alpha increasing).
  const auto& r = separable_crack();
  const auto& p = r.complex.field.perturbations().back();
  const double u_star = bump::alpha_extremum_location();
  const double u1 = bisect(p.slope, p.amplitude, 1e-9, u_star);
  const double u2 = bisect(p.slope, p.amplitude, u_star, 1.0 - 1e-9);
  const Vec2 lmax = p.to_local(r.complex.criticals[r.new_extremum].position);
  const Vec2 lsad = p.to_local(r.complex.criticals[r.new_saddle].position);
  EXPECT_NEAR(lmax.x(), u1, 0.05);
  EXPECT_NEAR(lsad.x(), u2, 0.05);
  EXPECT_LT(lmax.x(), lsad.x());
  EXPECT_NEAR(lmax.y(), 0.0, 0.05);
  EXPECT_NEAR(lsad.y(), 0.0, 0.05);
}

TEST(Crack, BaseIsRegular) {
  const auto cx = build_complex(fixtures::separable());
  for (const auto& d : cx.domains) EXPECT_EQ(d.classification, DomainClass::Regular);
}

TEST(Crack, ReversedGivesMinimum) {
  CrackOptions o;
  o.reversed = true;
  const auto r = verify_cracked(build_crack_perturbation(fixtures::separable(), kCenter, 0.3, o));
  EXPECT_EQ(r.complex.criticals[r.new_extremum].kind, CriticalKind::Minimum);
  EXPECT_EQ(degree(r.complex, r.new_extremum), 1);
  EXPECT_EQ(r.cracked_domains, 1);
}

TEST(Crack, Gates) {
  const MorseField f = fixtures::separable();
  CrackOptions weak;
  weak.amplitude = 0.5 * crack_threshold_amplitude(0.3);
  EXPECT_EQ(code_of([&] { make_crack_perturbation(f, kCenter, 0.3, weak); }), ErrorCode::AmplitudeTooSmall);
  EXPECT_EQ(code_of([&] { make_crack_perturbation(f, kCenter, 1.2); }), ErrorCode::PatchTooLarge);
  EXPECT_EQ(code_of([&] { make_crack_perturbation(f, {0.1, 0.05}, 0.3); }), ErrorCode::PatchContainsCriticalPoint);
  EXPECT_EQ(code_of([&] { verify_cracked(f); }), ErrorCode::InvalidArgument);
}

TEST(Crack, SlitMeshDuplicatesCrackVertices) {
  const auto& r = separable_crack();
  int cracked = -1;
  for (std::size_t d = 0; d < r.complex.domains.size(); ++d) {
    if (r.complex.domains[d].classification == DomainClass::Cracked) cracked = static_cast<int>(d);
  }
  ASSERT_GE(cracked, 0);
  MeshOptions o;
  o.h = 0.1;
  const TriMesh m = mesh_domain(r.complex, cracked, o);
  std::map<int, int> copies;
  for (std::size_t i = 0; i < m.origin.size(); ++i) copies[m.origin[i]]++;
  int left = 0, right = 0;
  for (const auto& e : m.boundary_edges) {
    left += e.marker == BoundaryMarker::CrackLeft;
    right += e.marker == BoundaryMarker::CrackRight;
  }
  EXPECT_GT(left, 0);
  EXPECT_EQ(left, right);
  // Crack vertices appear twice except the free tip.
  int doubled = 0;
  for (const auto& [v, n] : copies) {
    EXPECT_LE(n, 2);
    doubled += n == 2;
  }
  EXPECT_EQ(doubled, left);
  const Eigenpairs e = neumann_spectrum(m, 3);
  EXPECT_NEAR(e.values[0], 0.0, 1e-8);
  const Eigen::VectorXd u = e.vectors.col(0) / e.vectors.col(0).mean();
  EXPECT_LT((u.array() - 1.0).abs().maxCoeff(), 1e-6);
}
