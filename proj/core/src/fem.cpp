#include "neumann/fem.hpp"

#include "neumann/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace neumann {

FemMatrices assemble_p1(const TriMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> kt;
  std::vector<Eigen::Triplet<double>> mt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const Vec2& a = mesh.vertices[t[0]];
    const Vec2& b = mesh.vertices[t[1]];
    const Vec2& c = mesh.vertices[t[2]];
    const double area = 0.5 * cross(b - a, c - a);
    if (!(area > 0.0)) throw Error(ErrorCode::NonSPDMass, "triangle with non-positive area");
    // Gradients of the barycentric coordinates are the rotated opposite edges / 2A.
    const std::array<Vec2, 3> e{c - b, a - c, b - a};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(t[i], t[j], e[i].dot(e[j]) / (4.0 * area));
        mt.emplace_back(t[i], t[j], area / (i == j ? 6.0 : 12.0));
      }
    }
  }
  FemMatrices out;
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(kt.begin(), kt.end());
  out.mass.setFromTriplets(mt.begin(), mt.end());
  return out;
}

namespace {

Eigenpairs dense_eigs(const FemMatrices& fem, int k) {
  const Eigen::MatrixXd K(fem.stiffness);
  const Eigen::MatrixXd M(fem.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverBreakdown, "dense generalized eigensolver failed");
  Eigenpairs out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  out.vectors = es.eigenvectors().leftCols(k);
  out.dense = true;
  return out;
}

// Shift-invert Lanczos on (K + M)^{-1} M in the M inner product. Converged
// Ritz vectors are locked and each restart works in their M-complement, so
// repeated eigenvalues are found one copy per restart.
Eigenpairs lanczos_eigs(const FemMatrices& fem, int k, const EigenOptions& opts) {
  const SparseMatrix& M = fem.mass;
  const Eigen::Index n = M.rows();
  const SparseMatrix A = fem.stiffness + M;
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverBreakdown, "factorisation of K + M failed");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd locked(n, 0);
  std::vector<double> theta_locked;

  auto orthogonalise = [&](Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0) w -= locked * (locked.transpose() * (M * w));
      if (cols > 0) w -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * (M * w));
    }
  };

  const Eigen::Index steps = std::min<Eigen::Index>(n, std::max<Eigen::Index>(3 * k + 30, 60));
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    const Eigen::Index room = n - locked.cols();
    if (room <= 0) break;
    const Eigen::Index m = std::min(steps, room);
    Eigen::MatrixXd Q(n, m);
    Eigen::VectorXd alpha(m), beta(m);
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = normal(rng);
    orthogonalise(q, Q, 0);
    q /= std::sqrt(q.dot(M * q));
    Eigen::Index used = 0;
    double last_beta = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Q.col(j) = q;
      Eigen::VectorXd w = solver.solve(M * q);
      alpha[j] = w.dot(M * q);
      w -= alpha[j] * q;
      if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
      orthogonalise(w, Q, j + 1);
      const double b = std::sqrt(std::max(w.dot(M * w), 0.0));
      beta[j] = b;
      used = j + 1;
      last_beta = b;
      if (b <= 1e-14 * std::abs(alpha[j]) + 1e-300) break;
      q = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
    for (Eigen::Index j = 0; j < used; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
    // Descending theta is ascending mu.
    std::vector<Eigen::Index> order(used);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return tes.eigenvalues()[a] > tes.eigenvalues()[b]; });
    const double kth = static_cast<int>(theta_locked.size()) >= k
                           ? [&] {
                               std::vector<double> s = theta_locked;
                               std::sort(s.rbegin(), s.rend());
                               return s[k - 1];
                             }()
                           : 0.0;
    int newly = 0;
    bool top_converged = false;
    double top_theta = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const Eigen::Index i = order[r];
      const double th = tes.eigenvalues()[i];
      const double res = last_beta * std::abs(tes.eigenvectors()(used - 1, i));
      const bool ok = res <= opts.tolerance * std::abs(th);
      if (r == 0) {
        top_converged = ok;
        top_theta = th;
      }
      if (!ok) break;
      if (static_cast<int>(theta_locked.size()) >= k && th <= kth) break;
      Eigen::VectorXd y = Q.leftCols(used) * tes.eigenvectors().col(i);
      orthogonalise(y, Q, 0);
      y /= std::sqrt(y.dot(M * y));
      locked.conservativeResize(n, locked.cols() + 1);
      locked.col(locked.cols() - 1) = y;
      theta_locked.push_back(th);
      ++newly;
    }
    if (static_cast<int>(theta_locked.size()) >= k && newly == 0 && top_converged && top_theta <= kth) break;
    if (restart + 1 == opts.max_restarts) {
      throw Error(ErrorCode::SolverBreakdown, "Lanczos iteration did not converge");
    }
  }
  if (static_cast<int>(theta_locked.size()) < k) {
    throw Error(ErrorCode::SolverBreakdown, "Lanczos found fewer eigenpairs than requested");
  }
  std::vector<std::size_t> idx(theta_locked.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return theta_locked[a] > theta_locked[b]; });
  Eigenpairs out;
  out.dense = false;
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.values.push_back(1.0 / theta_locked[idx[i]] - 1.0);
    out.vectors.col(i) = locked.col(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

}  // namespace

Eigenpairs generalized_eigs(const FemMatrices& fem, int k, const EigenOptions& opts) {
  const auto n = fem.mass.rows();
  if (k <= 0 || k > n) throw Error(ErrorCode::InvalidArgument, "invalid number of eigenpairs");
  if (n < opts.dense_threshold) return dense_eigs(fem, k);
  return lanczos_eigs(fem, k, opts);
}

Eigenpairs neumann_spectrum(const TriMesh& mesh, int k, const EigenOptions& opts) {
  if (k <= 0 || 2 * static_cast<std::size_t>(k) >= mesh.vertices.size()) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < k < #vertices / 2");
  }
  return generalized_eigs(assemble_p1(mesh), k, opts);
}

}  // namespace neumann
