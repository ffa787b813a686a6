#include "neumann/spectrum.hpp"

#include "neumann/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace neumann {

SpectralPosition spectral_position(std::span<const double> mu, double lambda, double tau, double tau_abs) {
  if (!(tau >= 0.0 && tau < 0.5)) throw Error(ErrorCode::InvalidArgument, "cluster tolerance must lie in [0, 0.5)");
  if (!std::is_sorted(mu.begin(), mu.end())) throw Error(ErrorCode::InvalidArgument, "spectrum must be sorted");
  if (mu.empty() || mu.back() <= lambda) {
    throw Error(ErrorCode::SpectrumTooShort, "spectrum does not extend beyond lambda; request more eigenvalues");
  }
  SpectralPosition out;
  if (lambda <= tau_abs) {
    for (std::size_t n = 0; n < mu.size() && std::abs(mu[n]) <= tau_abs; ++n) out.cluster.push_back(static_cast<int>(n));
    return out;
  }
  const double cut = lambda * (1.0 - tau);
  for (std::size_t n = 0; n < mu.size(); ++n) {
    if (mu[n] < cut) ++out.position;
    if (std::abs(mu[n] - lambda) <= tau * lambda) out.cluster.push_back(static_cast<int>(n));
    if (mu[n] >= lambda * (1.0 - 2.0 * tau) && mu[n] < cut) {
      throw Error(ErrorCode::AmbiguousCluster,
                  "eigenvalue " + std::to_string(mu[n]) + " sits just below the cluster around lambda");
    }
  }
  return out;
}

namespace {

Eigen::VectorXd sample(const MorseField& field, const TriMesh& mesh) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) f[static_cast<Eigen::Index>(i)] = field.value(mesh.vertices[i]);
  return f;
}

void require_eigenfunction(const MorseField& field, double lambda) {
  const auto ev = field.eigenvalue();
  if (!ev) throw Error(ErrorCode::NotAnEigenfunctionField, "field is not a single Laplacian eigenfunction");
  if (std::abs(*ev - lambda) > 1e-9 * std::max(1.0, lambda)) {
    throw Error(ErrorCode::NotAnEigenfunctionField,
                "field has eigenvalue " + std::to_string(*ev) + ", not " + std::to_string(lambda));
  }
}

}  // namespace

double restriction_residual(const MorseField& field, const TriMesh& mesh, const FemMatrices& fem, double lambda) {
  require_eigenfunction(field, lambda);
  const Eigen::VectorXd F = sample(field, mesh);
  const Eigen::VectorXd MF = fem.mass * F;
  const Eigen::VectorXd R = fem.stiffness * F - lambda * MF;
  // Residual of the weak form, measured in the norm dual to the discrete H^1 norm.
  Eigen::SimplicialLDLT<SparseMatrix> h1(SparseMatrix(fem.stiffness + fem.mass));
  if (h1.info() != Eigen::Success) throw Error(ErrorCode::SolverBreakdown, "factorisation of K + M failed");
  const double num = std::sqrt(std::max(R.dot(h1.solve(R)), 0.0));
  const double den = std::sqrt(F.dot(MF));
  return lambda == 0.0 ? num / den : num / (lambda * den);
}

double restriction_residual(const MorseField& field, const TriMesh& mesh, double lambda) {
  return restriction_residual(field, mesh, assemble_p1(mesh), lambda);
}

namespace {

SpectrumReport solve_report(const TriMesh& mesh, const FemMatrices& fem, double lambda, const SpectrumOptions& opts) {
  const int k = std::min<int>(opts.num_eigs, static_cast<int>(mesh.vertices.size() / 2) - 1);
  if (k <= 0) throw Error(ErrorCode::InvalidArgument, "mesh too small for the requested spectrum");
  const Eigenpairs eig = generalized_eigs(fem, k, opts.eigen);
  SpectrumReport r;
  r.mu = eig.values;
  r.lambda = lambda;
  r.cluster_tol = opts.cluster_tol;
  r.h = mesh.h;
  r.grading = mesh.grading;
  r.t = mesh.t;
  r.vertices = mesh.vertices.size();
  r.triangles = mesh.triangles.size();
  const SpectralPosition pos = spectral_position(r.mu, lambda, opts.cluster_tol);
  r.position = pos.position;
  r.cluster = pos.cluster;
  double best = std::numeric_limits<double>::infinity();
  for (double m : r.mu) best = std::min(best, std::abs(m - lambda));
  r.distance = lambda > 0.0 ? best / lambda : best;
  return r;
}

}  // namespace

SpectrumReport spectrum_report(const TriMesh& mesh, double lambda, const SpectrumOptions& opts) {
  return solve_report(mesh, assemble_p1(mesh), lambda, opts);
}

SpectrumReport spectrum_report(const MorseField& field, const TriMesh& mesh, double lambda,
                               const SpectrumOptions& opts) {
  const FemMatrices fem = assemble_p1(mesh);
  SpectrumReport r = solve_report(mesh, fem, lambda, opts);
  r.residual = restriction_residual(field, mesh, fem, lambda);
  return r;
}

SpectrumReport spectrum_report(const NeumannComplex& complex, int domain, const SpectrumOptions& opts) {
  const auto ev = complex.field.eigenvalue();
  if (!ev) throw Error(ErrorCode::NotAnEigenfunctionField, "field is not a single Laplacian eigenfunction");
  const TriMesh mesh = mesh_domain(complex, domain, opts.mesh);
  return spectrum_report(complex.field, mesh, *ev, opts);
}

}  // namespace neumann
