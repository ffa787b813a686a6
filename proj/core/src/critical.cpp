#include "neumann/critical.hpp"

#include "neumann/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neumann {

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "maximum";
  }
  return "unknown";
}

int CriticalPoint::slow_index() const {
  return std::abs(hess_eigenvalues[0]) <= std::abs(hess_eigenvalues[1]) ? 0 : 1;
}

CriticalPoint classify_critical_point(const MorseField& field, const Vec2& position,
                                      const CriticalOptions& opts) {
  CriticalPoint cp;
  cp.position = wrap_point(position);
  // Snap coordinates that rounded up to 2pi back to 0 so sorting is stable.
  for (int i = 0; i < 2; ++i) {
    if (kTwoPi - cp.position[i] < 1e-13) cp.position[i] = 0.0;
  }
  const Jet j = field.jet(cp.position);
  cp.value = j.value;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(j.hessian);
  const Vec2 ev = eig.eigenvalues();
  cp.hess_eigenvalues = {ev[0], ev[1]};
  for (int i = 0; i < 2; ++i) {
    Vec2 v = eig.eigenvectors().col(i).normalized();
    // Canonical sign: first nonzero component positive.
    if (v.x() < -1e-14 || (std::abs(v.x()) <= 1e-14 && v.y() < 0.0)) v = -v;
    cp.hess_eigenvectors[i] = v;
  }
  if (ev[0] > 0.0 && ev[1] > 0.0) {
    cp.kind = CriticalKind::Minimum;
  } else if (ev[0] < 0.0 && ev[1] < 0.0) {
    cp.kind = CriticalKind::Maximum;
  } else {
    cp.kind = CriticalKind::Saddle;
  }
  const double big = std::max(std::abs(ev[0]), std::abs(ev[1]));
  cp.hess_proportional = std::abs(ev[0] - ev[1]) <= opts.proportional_tol * big;
  return cp;
}

namespace {

struct Root {
  Vec2 position;
  double det;
};

std::vector<Root> newton_roots(const MorseField& field, const CriticalOptions& opts, int grid) {
  const double spacing = kTwoPi / grid;
  const double max_step = 0.5 * spacing;
  const double scale = field.hessian_scale();
  std::vector<Root> roots;
  // Irrational offset keeps seeds off symmetry lines where the Hessian may be singular.
  const Vec2 offset(0.2371 * spacing, 0.3719 * spacing);
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      Vec2 x = offset + Vec2(ix * spacing, iy * spacing);
      bool converged = false;
      for (int it = 0; it < opts.max_iterations; ++it) {
        const Vec2 g = field.gradient(x);
        if (g.norm() <= opts.newton_tol) {
          converged = true;
          break;
        }
        const Mat2 h = field.hessian(x);
        const double det = h.determinant();
        // Minimum-norm step when the Hessian is (nearly) singular, so that
        // degenerate critical sets are still reached and then reported.
        Vec2 step = std::abs(det) > 1e-12 * scale * scale
                        ? Vec2(-h.inverse() * g)
                        : Vec2(-h.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(g));
        const double len = step.norm();
        if (!std::isfinite(len)) break;
        if (len > max_step) step *= max_step / len;
        x += step;
      }
      if (!converged) {
        // A final check catches roots reached on the last iteration.
        if (field.gradient(x).norm() > opts.newton_tol) continue;
      }
      x = wrap_point(x);
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
        return torus_distance(r.position, x) <= opts.dedup_radius;
      });
      if (!dup) roots.push_back({x, field.hessian(x).determinant()});
    }
  }
  return roots;
}

std::vector<CriticalPoint> classify_all(const MorseField& field, const std::vector<Root>& roots,
                                        const CriticalOptions& opts) {
  const double scale = field.hessian_scale();
  std::vector<CriticalPoint> out;
  out.reserve(roots.size());
  for (const auto& r : roots) {
    if (std::abs(r.det) < opts.morse_tol * scale * scale) {
      std::ostringstream msg;
      msg << "degenerate critical point at (" << r.position.x() << ", " << r.position.y()
          << "), det Hess = " << r.det;
      throw Error(ErrorCode::NotMorse, msg.str());
    }
    out.push_back(classify_critical_point(field, r.position, opts));
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
    return a.position.y() < b.position.y();
  });
  return out;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const MorseField& field, const CriticalOptions& opts) {
  if (opts.seed_grid < 8) throw Error(ErrorCode::InvalidArgument, "seed grid must be at least 8");
  const auto roots = newton_roots(field, opts, opts.seed_grid);
  // A smooth function on the torus attains a maximum and a minimum.
  if (roots.size() < 2) throw Error(ErrorCode::NotMorse, "Newton search found fewer than two critical points");
  auto points = classify_all(field, roots, opts);
  if (opts.check_refinement) {
    const auto fine = newton_roots(field, opts, 2 * opts.seed_grid);
    bool same = fine.size() == points.size();
    for (std::size_t i = 0; same && i < fine.size(); ++i) {
      same = std::any_of(points.begin(), points.end(), [&](const CriticalPoint& p) {
        return torus_distance(p.position, fine[i].position) <= opts.dedup_radius;
      });
    }
    if (!same) {
      std::ostringstream msg;
      msg << points.size() << " critical points at seed grid " << opts.seed_grid << " but "
          << fine.size() << " at " << 2 * opts.seed_grid;
      throw Error(ErrorCode::SeedGridTooCoarse, msg.str());
    }
  }
  return points;
}

CriticalCounts count_kinds(std::span<const CriticalPoint> points) {
  CriticalCounts c;
  for (const auto& p : points) {
    switch (p.kind) {
      case CriticalKind::Minimum: ++c.minima; break;
      case CriticalKind::Saddle: ++c.saddles; break;
      case CriticalKind::Maximum: ++c.maxima; break;
    }
  }
  return c;
}

bool euler_check(std::span<const CriticalPoint> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "empty critical point list");
  const auto c = count_kinds(points);
  return c.minima - c.saddles + c.maxima == 0;
}

int find_critical_near(std::span<const CriticalPoint> points, const Vec2& x, double radius) {
  int best = -1;
  double best_d = radius;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = torus_distance(points[i].position, x);
    if (d <= best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace neumann
