#pragma once

#include "neumann/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace neumann {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-linear stiffness and mass matrices with natural boundary conditions.
struct FemMatrices {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

/// Throws NonSPDMass for a triangle with non-positive area.
FemMatrices assemble_p1(const TriMesh& mesh);

struct EigenOptions {
  /// Problems with fewer unknowns use a dense solver.
  int dense_threshold = 800;
  /// Relative Ritz residual accepted by the iterative solver.
  double tolerance = 1e-10;
  int max_restarts = 60;
  std::uint64_t seed = 7;
};

struct Eigenpairs {
  /// Ascending.
  std::vector<double> values;
  /// Columns are M-orthonormal.
  Eigen::MatrixXd vectors;
  bool dense = true;
};

/// The k smallest eigenpairs of K u = mu M u. Throws SolverBreakdown.
Eigenpairs generalized_eigs(const FemMatrices& fem, int k, const EigenOptions& opts = {});

/// Assembles and solves; requires k < #vertices / 2.
Eigenpairs neumann_spectrum(const TriMesh& mesh, int k, const EigenOptions& opts = {});

}  // namespace neumann
