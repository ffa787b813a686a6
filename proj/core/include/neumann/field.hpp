#pragma once

#include "neumann/geometry.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace neumann {

/// One term a * cos(m x + n y + theta) of a trigonometric field.
struct Mode {
  double amplitude = 1.0;
  int m = 0;
  int n = 0;
  double phase = 0.0;

  int wave_number_sq() const { return m * m + n * n; }
};

/// Compactly supported bump added to a field in a rotated square patch.
///
/// In patch coordinates (u, v) = R^T (x - center) / scale the added term is
/// beta(u) * gamma(v) with
///   alpha(u) = -K u exp(-1/(1-u^2)),   beta(u) = int_{-1}^{u} alpha,
///   gamma(v) = exp(1 - 1/(1-v^2)),
/// all vanishing outside (-1,1). gamma is normalised so gamma(0) = 1, which
/// makes alpha(u) = -A exactly the critical-point condition on v = 0.
struct CrackPerturbation {
  Vec2 center = Vec2::Zero();
  /// Unit vector of the local u-axis (aligned with the base gradient).
  Vec2 axis = Vec2::UnitX();
  double scale = 0.1;
  /// Base gradient magnitude measured in patch units, |grad f(center)| * scale.
  double slope = 0.0;
  double amplitude = 1.0;

  Vec2 to_local(const Vec2& x) const;
  bool contains(const Vec2& x) const;

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  Mat2 hessian(const Vec2& x) const;
};

namespace bump {
double alpha(double u, double amplitude);
double alpha_prime(double u, double amplitude);
double beta(double u, double amplitude);
double gamma(double v);
double gamma_prime(double v);
double gamma_second(double v);
/// Position in (0,1) where |alpha| is largest for positive amplitude.
double alpha_extremum_location();
}  // namespace bump

struct Jet {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Mat2 hessian = Mat2::Zero();
};

/// Closed-form smooth function on the flat torus [0, 2pi)^2.
class MorseField {
 public:
  MorseField() = default;
  explicit MorseField(std::vector<Mode> modes, std::vector<CrackPerturbation> perturbations = {});

  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<CrackPerturbation>& perturbations() const { return perturbations_; }

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  Mat2 hessian(const Vec2& x) const;
  Jet jet(const Vec2& x) const;

  /// Laplacian eigenvalue m^2+n^2 shared by every mode, when the field is an
  /// unperturbed eigenfunction of -Delta.
  std::optional<double> eigenvalue() const;

  /// Typical Hessian magnitude; used to scale degeneracy tolerances.
  double hessian_scale() const;

  MorseField negated() const;
  MorseField with_perturbation(const CrackPerturbation& p) const;

 private:
  std::vector<Mode> modes_;
  std::vector<CrackPerturbation> perturbations_;
};

using Evaluation = std::variant<double, Vec2, Mat2>;

/// Value (order 0), gradient (order 1) or Hessian (order 2) at `x`.
Evaluation evaluate(const MorseField& field, const Vec2& x, int order);

}  // namespace neumann
