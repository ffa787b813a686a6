#include "neumann/field.hpp"

#include "neumann/error.hpp"

#include <algorithm>
#include <cmath>

namespace neumann {

namespace bump {

namespace {
// Exponential integral E1(z) = -Ei(-z).
double exp_integral_e1(double z) {
  if (z > 700.0) return 0.0;
  return -std::expint(-z);
}
}  // namespace

double alpha(double u, double amplitude) {
  if (std::abs(u) >= 1.0) return 0.0;
  return -amplitude * u * std::exp(-1.0 / (1.0 - u * u));
}

double alpha_prime(double u, double amplitude) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return -amplitude * std::exp(-1.0 / w) * (1.0 - 2.0 * u * u / (w * w));
}

// With s = 1 - u^2, d/ds [s e^{-1/s} - E1(1/s)] = e^{-1/s}, so the antiderivative
// of -K u e^{-1/(1-u^2)} vanishing at u = -1 is (K/2)(s e^{-1/s} - E1(1/s)).
double beta(double u, double amplitude) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double s = 1.0 - u * u;
  const double z = 1.0 / s;
  if (z > 700.0) return 0.0;
  return 0.5 * amplitude * (s * std::exp(-z) - exp_integral_e1(z));
}

double gamma(double v) {
  if (std::abs(v) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - v * v));
}

double gamma_prime(double v) {
  if (std::abs(v) >= 1.0) return 0.0;
  const double w = 1.0 - v * v;
  return gamma(v) * (-2.0 * v / (w * w));
}

double gamma_second(double v) {
  if (std::abs(v) >= 1.0) return 0.0;
  const double w = 1.0 - v * v;
  const double phi1 = -2.0 * v / (w * w);
  const double phi2 = -2.0 / (w * w) - 8.0 * v * v / (w * w * w);
  return gamma(v) * (phi1 * phi1 + phi2);
}

double alpha_extremum_location() { return (std::sqrt(6.0) - std::sqrt(2.0)) / 2.0; }

}  // namespace bump

Vec2 CrackPerturbation::to_local(const Vec2& x) const {
  const Vec2 d = torus_delta(center, x);
  const Vec2 normal(-axis.y(), axis.x());
  return Vec2(axis.dot(d), normal.dot(d)) / scale;
}

bool CrackPerturbation::contains(const Vec2& x) const {
  const Vec2 l = to_local(x);
  return std::abs(l.x()) < 1.0 && std::abs(l.y()) < 1.0;
}

double CrackPerturbation::value(const Vec2& x) const {
  const Vec2 l = to_local(x);
  if (std::abs(l.x()) >= 1.0 || std::abs(l.y()) >= 1.0) return 0.0;
  return bump::beta(l.x(), amplitude) * bump::gamma(l.y());
}

Vec2 CrackPerturbation::gradient(const Vec2& x) const {
  const Vec2 l = to_local(x);
  if (std::abs(l.x()) >= 1.0 || std::abs(l.y()) >= 1.0) return Vec2::Zero();
  const Vec2 local(bump::alpha(l.x(), amplitude) * bump::gamma(l.y()),
                   bump::beta(l.x(), amplitude) * bump::gamma_prime(l.y()));
  const Vec2 normal(-axis.y(), axis.x());
  return (local.x() * axis + local.y() * normal) / scale;
}

Mat2 CrackPerturbation::hessian(const Vec2& x) const {
  const Vec2 l = to_local(x);
  if (std::abs(l.x()) >= 1.0 || std::abs(l.y()) >= 1.0) return Mat2::Zero();
  const double u = l.x();
  const double v = l.y();
  Mat2 local;
  local(0, 0) = bump::alpha_prime(u, amplitude) * bump::gamma(v);
  local(0, 1) = local(1, 0) = bump::alpha(u, amplitude) * bump::gamma_prime(v);
  local(1, 1) = bump::beta(u, amplitude) * bump::gamma_second(v);
  Mat2 rot;
  rot.col(0) = axis;
  rot.col(1) = Vec2(-axis.y(), axis.x());
  return rot * local * rot.transpose() / (scale * scale);
}

MorseField::MorseField(std::vector<Mode> modes, std::vector<CrackPerturbation> perturbations)
    : modes_(std::move(modes)), perturbations_(std::move(perturbations)) {
  for (const auto& p : perturbations_) {
    if (!(p.scale > 0.0) || std::abs(p.axis.norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "perturbation needs positive scale and unit axis");
    }
  }
}

double MorseField::value(const Vec2& x) const {
  double f = 0.0;
  for (const auto& md : modes_) f += md.amplitude * std::cos(md.m * x.x() + md.n * x.y() + md.phase);
  for (const auto& p : perturbations_) f += p.value(x);
  return f;
}

Vec2 MorseField::gradient(const Vec2& x) const {
  Vec2 g = Vec2::Zero();
  for (const auto& md : modes_) {
    const double s = -md.amplitude * std::sin(md.m * x.x() + md.n * x.y() + md.phase);
    g += s * Vec2(md.m, md.n);
  }
  for (const auto& p : perturbations_) g += p.gradient(x);
  return g;
}

Mat2 MorseField::hessian(const Vec2& x) const {
  Mat2 h = Mat2::Zero();
  for (const auto& md : modes_) {
    const double c = -md.amplitude * std::cos(md.m * x.x() + md.n * x.y() + md.phase);
    const Vec2 k(md.m, md.n);
    h += c * k * k.transpose();
  }
  for (const auto& p : perturbations_) h += p.hessian(x);
  return h;
}

Jet MorseField::jet(const Vec2& x) const {
  Jet j;
  for (const auto& md : modes_) {
    const double phase = md.m * x.x() + md.n * x.y() + md.phase;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    const Vec2 k(md.m, md.n);
    j.value += md.amplitude * c;
    j.gradient -= md.amplitude * s * k;
    j.hessian -= md.amplitude * c * k * k.transpose();
  }
  for (const auto& p : perturbations_) {
    if (!p.contains(x)) continue;
    j.value += p.value(x);
    j.gradient += p.gradient(x);
    j.hessian += p.hessian(x);
  }
  return j;
}

std::optional<double> MorseField::eigenvalue() const {
  if (modes_.empty() || !perturbations_.empty()) return std::nullopt;
  const int k2 = modes_.front().wave_number_sq();
  for (const auto& md : modes_) {
    if (md.wave_number_sq() != k2) return std::nullopt;
  }
  return static_cast<double>(k2);
}

double MorseField::hessian_scale() const {
  double s = 0.0;
  for (const auto& md : modes_) s += std::abs(md.amplitude) * md.wave_number_sq();
  for (const auto& p : perturbations_) s += std::abs(p.amplitude) / (p.scale * p.scale);
  return std::max(s, 1e-300);
}

MorseField MorseField::negated() const {
  auto modes = modes_;
  for (auto& md : modes) md.amplitude = -md.amplitude;
  auto perts = perturbations_;
  for (auto& p : perts) p.amplitude = -p.amplitude;
  return MorseField(std::move(modes), std::move(perts));
}

MorseField MorseField::with_perturbation(const CrackPerturbation& p) const {
  auto perts = perturbations_;
  perts.push_back(p);
  return MorseField(modes_, std::move(perts));
}

Evaluation evaluate(const MorseField& field, const Vec2& x, int order) {
  const Vec2 r = wrap_point(x);
  switch (order) {
    case 0: return field.value(r);
    case 1: return field.gradient(r);
    case 2: return field.hessian(r);
    default: throw Error(ErrorCode::InvalidArgument, "order must be 0, 1 or 2");
  }
}

}  // namespace neumann
