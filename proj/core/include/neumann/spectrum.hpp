#pragma once

#include "neumann/complex.hpp"
#include "neumann/fem.hpp"
#include "neumann/mesh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace neumann {

struct SpectralPosition {
  /// Number of eigenvalues strictly below lambda (1 - tau).
  int position = 0;
  /// Indices n with |mu_n - lambda| <= tau lambda.
  std::vector<int> cluster;
};

/// Counts eigenvalues below lambda with a relative cluster guard. Values of
/// lambda at or below `tau_abs` count as the ground state. Throws
/// SpectrumTooShort when the spectrum does not extend beyond lambda and
/// AmbiguousCluster when an eigenvalue lies in [lambda (1 - 2 tau), lambda (1 - tau)).
SpectralPosition spectral_position(std::span<const double> mu, double lambda, double tau = 1e-3,
                                   double tau_abs = 1e-8);

/// ||K F - lambda M F||_* / (lambda ||F||_M) for F the field sampled at the mesh
/// vertices, where ||r||_*^2 = r^T (K + M)^{-1} r is the discrete dual H^1 norm;
/// the lambda factor is dropped when lambda is 0. Throws NotAnEigenfunctionField.
double restriction_residual(const MorseField& field, const TriMesh& mesh, double lambda);
double restriction_residual(const MorseField& field, const TriMesh& mesh, const FemMatrices& fem, double lambda);

struct SpectrumOptions {
  MeshOptions mesh;
  int num_eigs = 10;
  double cluster_tol = 1e-3;
  EigenOptions eigen;
};

struct SpectrumReport {
  std::vector<double> mu;
  double lambda = 0.0;
  int position = 0;
  std::vector<int> cluster;
  /// Empty when no field was restricted to the region.
  std::optional<double> residual;
  /// min_n |mu_n - lambda| / lambda.
  double distance = 0.0;
  double h = 0.0;
  double grading = 1.0;
  std::optional<double> t;
  double cluster_tol = 1e-3;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
};

/// Meshes one domain of the complex, solves for its spectrum and places the
/// field's eigenvalue in it.
SpectrumReport spectrum_report(const NeumannComplex& complex, int domain, const SpectrumOptions& opts);

/// Spectrum of an already meshed region and the position of `lambda` in it.
SpectrumReport spectrum_report(const TriMesh& mesh, double lambda, const SpectrumOptions& opts);

/// Same, with the restriction residual of `field`.
SpectrumReport spectrum_report(const MorseField& field, const TriMesh& mesh, double lambda,
                               const SpectrumOptions& opts);

}  // namespace neumann
