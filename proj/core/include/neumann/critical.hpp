#pragma once

#include "neumann/field.hpp"

#include <array>
#include <span>
#include <vector>

namespace neumann {

enum class CriticalKind { Minimum, Saddle, Maximum };

const char* to_string(CriticalKind kind);

struct CriticalPoint {
  Vec2 position = Vec2::Zero();  // in [0, 2pi)^2
  CriticalKind kind = CriticalKind::Saddle;
  double value = 0.0;
  /// Hessian eigenvalues in ascending order with matching unit eigenvectors.
  std::array<double, 2> hess_eigenvalues{};
  std::array<Vec2, 2> hess_eigenvectors{Vec2::UnitX(), Vec2::UnitY()};
  bool hess_proportional = false;
  /// Number of incident Neumann lines; filled in by build_complex.
  int degree = 0;

  bool is_extremum() const { return kind != CriticalKind::Saddle; }
  /// Index of the eigenvalue with the smaller magnitude.
  int slow_index() const;
};

struct CriticalOptions {
  int seed_grid = 32;
  double newton_tol = 1e-12;
  int max_iterations = 50;
  double dedup_radius = 1e-6;
  double proportional_tol = 1e-8;
  /// |det Hess| below this fraction of hessian_scale()^2 is treated as degenerate.
  double morse_tol = 1e-8;
  /// Re-run at 2 * seed_grid and require the same inventory.
  bool check_refinement = true;
};

/// Classifies a point with vanishing gradient from its Hessian.
CriticalPoint classify_critical_point(const MorseField& field, const Vec2& position,
                                      const CriticalOptions& opts = {});

/// Newton search from a seed lattice. Results are sorted by (kind, x, y).
/// Throws NotMorse or SeedGridTooCoarse.
std::vector<CriticalPoint> find_critical_points(const MorseField& field,
                                                const CriticalOptions& opts = {});

/// Torus Euler characteristic check: #min - #saddle + #max == 0.
bool euler_check(std::span<const CriticalPoint> points);

struct CriticalCounts {
  int minima = 0;
  int saddles = 0;
  int maxima = 0;
};
CriticalCounts count_kinds(std::span<const CriticalPoint> points);

/// Index of the critical point within `radius` (torus metric) of `x`, or -1.
int find_critical_near(std::span<const CriticalPoint> points, const Vec2& x, double radius);

}  // namespace neumann
