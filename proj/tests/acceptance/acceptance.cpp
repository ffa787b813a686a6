// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "neumann/complex.hpp"
#include "neumann/cracked.hpp"
#include "neumann/error.hpp"
#include "neumann/fem.hpp"
#include "neumann/invariants.hpp"
#include "neumann/io.hpp"
#include "neumann/nodal.hpp"
#include "neumann/spectrum.hpp"
#include "neumann/truncate.hpp"

#include "test_fields.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace neumann;

namespace {

constexpr double kDeg = kPi / 180.0;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  // Records a failed requirement; the first one is reported.
  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      detail.str("");
      detail << "failed: " << what;
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Outcome&)> run;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

Eigen::VectorXd ground_state(const Eigenpairs& e) { return e.vectors.col(0) / e.vectors.col(0).mean(); }

bool constant_ground_state(const TriMesh& mesh, double& mu0) {
  const Eigenpairs e = neumann_spectrum(mesh, 3);
  mu0 = e.values[0];
  return std::abs(mu0) <= 1e-8 && (ground_state(e).array() - 1.0).abs().maxCoeff() <= 1e-6;
}

TriMesh square_mesh(double h) {
  MeshOptions o;
  o.h = h;
  return mesh_polygon({{0, 0}, {kPi, 0}, {kPi, kPi}, {0, kPi}}, o);
}

// 1. Separable pipeline.
void separable_pipeline(Outcome& out) {
  const MorseField f = fixtures::separable();
  const NeumannComplex cx = build_complex(f);
  const Vec2 expect[4] = {{0, 0}, {kPi, kPi}, {0, kPi}, {kPi, 0}};
  const CriticalKind kinds[4] = {CriticalKind::Maximum, CriticalKind::Minimum, CriticalKind::Saddle, CriticalKind::Saddle};
  out.require(cx.criticals.size() == 4, "four critical points");
  for (int i = 0; i < 4; ++i) {
    const int c = find_critical_near(cx.criticals, expect[i], 1e-8);
    out.require(c >= 0 && cx.criticals[c].kind == kinds[i], "critical point at exact location");
  }
  out.require(cx.criticals.size() == 4 && cx.lines.size() == 8 && cx.domains.size() == 4, "V=4, E=8, F=4");
  for (const auto& d : cx.domains) {
    Vec2 lo = d.outline.front(), hi = lo;
    for (const auto& p : d.outline) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const bool square = std::abs(d.area - kPi * kPi) < 1e-6 && (hi - lo - Vec2(kPi, kPi)).norm() < 1e-6;
    out.require(d.classification == DomainClass::Regular && square, "every domain a regular square");
  }

  const double exact[9] = {0, 1, 1, 2, 4, 4, 5, 5, 8};
  std::vector<double> residuals;
  SpectrumReport finest;
  for (int n : {16, 32, 64}) {
    SpectrumOptions o;
    o.mesh.h = kPi / n;
    o.num_eigs = 10;
    finest = spectrum_report(cx, 0, o);
    residuals.push_back(*finest.residual);
  }
  double worst = 0.0;
  out.require(std::abs(finest.mu[0]) <= 1e-8, "mu_0 = 0");
  for (int i = 1; i < 9; ++i) worst = std::max(worst, std::abs(finest.mu[i] - exact[i]) / exact[i]);
  out.require(worst <= 0.01, "spectrum within 1% at h = pi/64");
  out.require(residuals[2] <= 1e-2, "residual <= 1e-2");
  out.require(residuals[0] > residuals[1] && residuals[1] > residuals[2], "residual decreasing under h-halving");
  out.require(finest.position == 1, "N(1) = 1");
  if (out.passed) {
    out.detail << "max rel. eigenvalue error " << fmt(worst) << ", residual " << fmt(residuals[0]) << " > "
               << fmt(residuals[1]) << " > " << fmt(residuals[2]) << ", N(1) = " << finest.position;
  }
}

// 2. Angle laws on the lambda = 17 field.
void angle_laws(Outcome& out) {
  const NeumannComplex cx = build_complex(fixtures::lambda17());
  const double tol = 2.0 * kDeg;
  double saddle_dev = 0.0, extremum_dev = 0.0, nodal_dev = 0.0;
  int extrema_checked = 0;
  for (std::size_t i = 0; i < cx.criticals.size(); ++i) {
    const auto& c = cx.criticals[i];
    const auto angles = angles_at(cx, static_cast<int>(i));
    if (c.kind == CriticalKind::Saddle) {
      out.require(angles.size() == 4, "four lines at every saddle");
      for (double a : angles) saddle_dev = std::max(saddle_dev, std::abs(a - kPi / 2));
    } else if (!c.hess_proportional) {
      ++extrema_checked;
      for (double a : angles) {
        const double d = std::min({std::abs(a), std::abs(a - kPi / 2), std::abs(a - kPi)});
        extremum_dev = std::max(extremum_dev, d);
      }
    }
  }
  const auto crossings = nodal_neumann_angles(cx, nodal_set(cx.field));
  int at_saddles = 0;
  for (const auto& x : crossings) {
    const double target = x.saddle >= 0 ? kPi / 4 : kPi / 2;
    at_saddles += x.saddle >= 0;
    nodal_dev = std::max(nodal_dev, std::abs(x.angle - target));
  }
  out.require(saddle_dev <= tol, "saddle angles within 2 deg of pi/2");
  out.require(extremum_dev <= tol, "extremum meeting angles within 2 deg of {0, pi/2, pi}");
  out.require(!crossings.empty() && nodal_dev <= tol, "nodal crossings within 2 deg of pi/4 or pi/2");
  if (out.passed) {
    out.detail << "max deviation: saddles " << fmt(saddle_dev / kDeg) << " deg, " << extrema_checked
               << " extrema " << fmt(extremum_dev / kDeg) << " deg, " << crossings.size() << " nodal crossings ("
               << at_saddles << " at saddles) " << fmt(nodal_dev / kDeg) << " deg";
  }
}

// 3. The field restricted to a regular domain is a Neumann eigenfunction.
void restriction_theorem(Outcome& out) {
  const NeumannComplex cx = build_complex(fixtures::lambda17());
  int domain = -1;
  for (std::size_t d = 0; d < cx.domains.size() && domain < 0; ++d) {
    if (cx.domains[d].classification == DomainClass::Regular) domain = static_cast<int>(d);
  }
  out.require(domain >= 0, "a regular domain exists");
  if (domain < 0) return;
  std::vector<double> residuals;
  double distance = 1.0;
  int position = -1;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    SpectrumOptions o;
    o.mesh.h = h;
    const auto r = spectrum_report(cx, domain, o);
    residuals.push_back(*r.residual);
    distance = r.distance;
    position = r.position;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < residuals.size(); ++i) monotone = monotone && residuals[i] < residuals[i - 1];
  out.require(distance <= 0.02, "dist(17, sigma_h)/17 <= 2%");
  out.require(monotone, "residual decreasing over three refinements");
  if (out.passed) {
    out.detail << "domain " << domain << ", dist " << fmt(distance) << ", N(17) = " << position << ", residual";
    for (double r : residuals) out.detail << ' ' << fmt(r);
  }
}

// 4. Cusp exponent and level-line decay.
void cusp_geometry(Outcome& out) {
  // A confirmed cusp at a maximum; if every cusp sits at a minimum, use -f.
  const MorseField base = fixtures::lambda17_generic();
  for (int negate = 0; negate < 2; ++negate) {
    const MorseField f = negate ? base.negated() : base;
    const NeumannComplex cx = build_complex(f);
    for (std::size_t d = 0; d < cx.domains.size(); ++d) {
      for (const auto& c : cx.domains[d].cusps) {
        if (!c.confirmed || c.critical != cx.domains[d].max_point) continue;
        Eigen::SelfAdjointEigenSolver<Mat2> es(f.hessian(cx.criticals[c.critical].position));
        const double a = std::abs(es.eigenvalues()[0]), b = std::abs(es.eigenvalues()[1]);
        const double ratio = std::max(a, b) / std::min(a, b);
        const double rel = std::abs(c.fitted_exponent - ratio) / ratio;
        out.require(rel <= 0.05, "fitted exponent within 5% of Hessian ratio");
        const auto decay = cusp_length_decay(cx, static_cast<int>(d), {0.9, 0.99, 0.999});
        bool decreasing = true;
        for (std::size_t i = 1; i < decay.size(); ++i) {
          decreasing = decreasing && decay[i].normalized_plus < decay[i - 1].normalized_plus;
        }
        out.require(decay[0].length_plus > 0.0 && decreasing, "L(gamma+, t)/sqrt(1-t) strictly decreasing");
        if (out.passed) {
          out.detail << (negate ? "-f" : "f") << ", domain " << d << ": exponent " << fmt(c.fitted_exponent)
                     << " vs ratio " << fmt(ratio) << " (" << fmt(100 * rel) << "%), normalised lengths";
          for (const auto& x : decay) out.detail << ' ' << fmt(x.normalized_plus);
        }
        return;
      }
    }
  }
  out.require(false, "no confirmed cusp at a maximum");
}

// 5. Crack construction on the separable base.
void crack(Outcome& out) {
  const MorseField base = fixtures::separable();
  const MorseField tilde = build_crack_perturbation(base, {kPi / 2, kPi / 2}, 0.3);
  // Independent outside check on a grid offset from the one used by verify_cracked.
  const auto& patch = tilde.perturbations().back();
  double outside = 0.0;
  for (int j = 0; j < 300; ++j) {
    for (int i = 0; i < 300; ++i) {
      const Vec2 x(kTwoPi * (i + 0.31) / 300, kTwoPi * (j + 0.77) / 300);
      if (!patch.contains(x)) outside = std::max(outside, std::abs(tilde.value(x) - base.value(x)));
    }
  }
  CrackedReport r;
  try {
    r = verify_cracked(tilde);
  } catch (const Error& e) {
    out.require(false, e.what());
    return;
  }
  const int base_count = static_cast<int>(find_critical_points(base).size());
  const int new_points = static_cast<int>(r.complex.criticals.size()) - base_count;
  out.require(new_points == 2, "exactly two new critical points");
  const auto& q = r.complex.criticals[r.new_extremum];
  const auto& s = r.complex.criticals[r.new_saddle];
  out.require(q.kind == CriticalKind::Maximum && s.kind == CriticalKind::Saddle, "new maximum and saddle");
  out.require(std::abs(q.hess_eigenvalues[1]) > 1e-8 && std::abs(s.hess_eigenvalues[0]) > 1e-8 &&
                  std::abs(q.hess_eigenvalues[0]) > 1e-8 && std::abs(s.hess_eigenvalues[1]) > 1e-8,
              "new points non-degenerate");
  out.require(r.complex.morse_smale, "perturbed field Morse-Smale");
  out.require(degree(r.complex, r.new_extremum) == 1, "degree(q*) = 1");
  out.require(r.cracked_domains == 1, "exactly one cracked domain");
  out.require(outside == 0.0 && r.max_outside_difference == 0.0, "field unchanged outside the patch");
  if (out.passed) {
    out.detail << r.checks.size() << " construction checks, V/E/F " << r.complex.criticals.size() << '/'
               << r.complex.lines.size() << '/' << r.complex.domains.size() << ", outside difference " << outside;
  }
}

// 6. Finite element self-validation.
void fem_validation(Outcome& out) {
  std::vector<double> mu;
  for (int n : {16, 32, 64}) mu.push_back(neumann_spectrum(square_mesh(kPi / n), 3).values[1]);
  const double order = std::log2((mu[0] - mu[1]) / (mu[1] - mu[2]));
  out.require(order >= 1.7 && order <= 2.3, "convergence order in [1.7, 2.3]");

  double worst_mu0 = 0.0;
  int meshes = 0;
  auto ground = [&](const TriMesh& m, const std::string& what) {
    double mu0 = 0.0;
    out.require(constant_ground_state(m, mu0), "constant ground state on " + what);
    worst_mu0 = std::max(worst_mu0, std::abs(mu0));
    ++meshes;
  };
  for (int n : {16, 32, 64}) ground(square_mesh(kPi / n), "square");
  const NeumannComplex sep = build_complex(fixtures::separable());
  ground(mesh_domain(sep, 0, {}), "separable domain");
  const NeumannComplex cracked = verify_cracked(build_crack_perturbation(sep.field, {kPi / 2, kPi / 2}, 0.3)).complex;
  int slit_meshes = 0;
  for (std::size_t d = 0; d < cracked.domains.size(); ++d) {
    if (cracked.domains[d].classification != DomainClass::Cracked) continue;
    for (double h : {0.1, 0.05}) {
      MeshOptions o;
      o.h = h;
      const TriMesh m = mesh_domain(cracked, static_cast<int>(d), o);
      bool slit = false;
      for (const auto& e : m.boundary_edges) slit = slit || e.marker == BoundaryMarker::CrackLeft;
      out.require(slit, "cracked domain meshed with a slit");
      ground(m, "slit mesh");
      ++slit_meshes;
    }
  }
  out.require(slit_meshes > 0, "slit meshes tested");
  if (out.passed) {
    out.detail << "order " << fmt(order) << " (mu_1 = " << mu[0] << ", " << mu[1] << ", " << mu[2] << "), max |mu_0| "
               << fmt(worst_mu0) << " over " << meshes << " meshes (" << slit_meshes << " slit)";
  }
}

// 7. Invariant suite on the bundled fields.
void invariants(Outcome& out) {
  int checks = 0;
  for (const char* name : {"separable", "lambda17", "lambda17_generic"}) {
    const auto r = verify_invariants(load_field(fixtures::data_path(std::string("fields/") + name + ".json")));
    for (const auto& c : r.checks) {
      out.require(c.passed, std::string(name) + ": " + c.name + " (" + c.detail + ")");
      ++checks;
    }
  }
  if (out.passed) out.detail << checks << " checks on 3 fields";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "separable pipeline", 30, separable_pipeline},
      {2, "angle laws at lambda = 17", 60, angle_laws},
      {3, "restriction to a lambda = 17 domain", 180, restriction_theorem},
      {4, "cusp geometry", 600, cusp_geometry},
      {5, "crack construction", 60, crack},
      {6, "FEM self-validation", 600, fem_validation},
      {7, "invariant suite", 600, invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) out.require(false, "runtime " + fmt(secs) + " s over budget " + fmt(c.budget_s) + " s");
    failed += !out.passed;
    std::printf("[%s] criterion %d: %s (%.1f s) %s\n", out.passed ? "PASS" : "FAIL", c.id, c.title, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
