#include "neumann/cracked.hpp"

#include "neumann/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neumann {

namespace {

constexpr int kPatchGrid = 40;

Vec2 from_local(const CrackPerturbation& p, double u, double v) {
  const Vec2 normal(-p.axis.y(), p.axis.x());
  return p.center + p.scale * (u * p.axis + v * normal);
}

// Newton on grad f from x; true if it converges to a point inside the closed patch.
bool newton_hits_patch(const MorseField& f, const CrackPerturbation& p, Vec2 x) {
  for (int it = 0; it < 50; ++it) {
    const Vec2 g = f.gradient(x);
    const Mat2 H = f.hessian(x);
    if (std::abs(H.determinant()) < 1e-300) return false;
    const Vec2 dx = H.inverse() * g;
    x -= dx;
    if (dx.norm() < 1e-13) break;
  }
  if (f.gradient(x).norm() > 1e-9) return false;
  const Vec2 l = p.to_local(x);
  return std::abs(l.x()) <= 1.0 + 1e-9 && std::abs(l.y()) <= 1.0 + 1e-9;
}

}  // namespace

double crack_threshold_amplitude(double slope) {
  return slope / std::abs(bump::alpha(bump::alpha_extremum_location(), 1.0));
}

CrackPerturbation make_crack_perturbation(const MorseField& field, const Vec2& center, double scale,
                                          const CrackOptions& opts) {
  if (!(scale > 0.0 && scale < kPi)) throw Error(ErrorCode::InvalidArgument, "patch scale must lie in (0, pi)");
  const Vec2 g = field.gradient(center);
  if (g.norm() == 0.0) throw Error(ErrorCode::PatchContainsCriticalPoint, "patch centre is a critical point");
  CrackPerturbation p;
  p.center = wrap_point(center);
  p.axis = g.normalized();
  p.scale = scale;
  p.slope = g.norm() * scale;

  // Critical points of the base field in the closed patch: Newton from every
  // cell where both gradient components can vanish.
  const double f0 = field.value(p.center);
  double worst = 0.0;
  std::vector<Vec2> grad((kPatchGrid + 1) * (kPatchGrid + 1));
  for (int j = 0; j <= kPatchGrid; ++j) {
    for (int i = 0; i <= kPatchGrid; ++i) {
      const double u = -1.0 + 2.0 * i / kPatchGrid;
      const double v = -1.0 + 2.0 * j / kPatchGrid;
      const Vec2 x = from_local(p, u, v);
      grad[j * (kPatchGrid + 1) + i] = field.gradient(x);
      worst = std::max(worst, std::abs(field.value(x) - f0 - g.dot(torus_delta(p.center, x))));
    }
  }
  for (int j = 0; j < kPatchGrid; ++j) {
    for (int i = 0; i < kPatchGrid; ++i) {
      Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
      Vec2 hi = -lo;
      for (int c = 0; c < 4; ++c) {
        const Vec2& gg = grad[(j + c / 2) * (kPatchGrid + 1) + i + c % 2];
        lo = lo.cwiseMin(gg);
        hi = hi.cwiseMax(gg);
      }
      const double slack = 0.1 * g.norm();
      if (lo.x() > slack || hi.x() < -slack || lo.y() > slack || hi.y() < -slack) continue;
      const double u = -1.0 + 2.0 * (i + 0.5) / kPatchGrid;
      const double v = -1.0 + 2.0 * (j + 0.5) / kPatchGrid;
      if (newton_hits_patch(field, p, from_local(p, u, v))) {
        throw Error(ErrorCode::PatchContainsCriticalPoint, "the base field has a critical point in the patch");
      }
    }
  }
  if (worst > opts.linearity_tol * 2.0 * p.slope) {
    std::ostringstream msg;
    msg << "base field deviates from linear by " << worst / (2.0 * p.slope) * 100.0 << "% over the patch";
    throw Error(ErrorCode::PatchTooLarge, msg.str());
  }

  const double threshold = crack_threshold_amplitude(p.slope);
  const double k = opts.amplitude.value_or(2.0 * threshold);
  if (!(std::abs(k) > threshold)) {
    std::ostringstream msg;
    msg << "amplitude " << k << " does not reach the crossing threshold " << threshold;
    throw Error(ErrorCode::AmplitudeTooSmall, msg.str());
  }
  p.amplitude = opts.reversed ? -std::abs(k) : std::abs(k);
  return p;
}

MorseField build_crack_perturbation(const MorseField& field, const Vec2& center, double scale,
                                    const CrackOptions& opts) {
  return field.with_perturbation(make_crack_perturbation(field, center, scale, opts));
}

bool CrackedReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

CrackedReport verify_cracked(const MorseField& field_tilde, const ComplexOptions& opts) {
  if (field_tilde.perturbations().empty()) {
    throw Error(ErrorCode::InvalidArgument, "field carries no crack perturbation");
  }
  const CrackPerturbation& patch = field_tilde.perturbations().back();
  std::vector<CrackPerturbation> rest(field_tilde.perturbations().begin(), field_tilde.perturbations().end() - 1);
  const MorseField base(field_tilde.modes(), rest);

  CrackedReport r;
  auto check = [&](const std::string& name, bool passed, const std::string& detail = {}) {
    r.checks.push_back({name, passed, detail});
  };

  const auto base_cps = find_critical_points(base, opts.critical);
  const auto tilde_cps = find_critical_points(field_tilde, opts.critical);
  auto match = [](const std::vector<CriticalPoint>& cps, const Vec2& x) {
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (torus_distance(cps[i].position, x) < 1e-6) return static_cast<int>(i);
    }
    return -1;
  };

  bool unchanged = true;
  for (const auto& c : base_cps) {
    const int m = match(tilde_cps, c.position);
    if (m < 0 || tilde_cps[m].kind != c.kind || std::abs(tilde_cps[m].value - c.value) > 1e-12) unchanged = false;
  }
  check("base critical points unchanged", unchanged);

  std::vector<int> fresh;
  for (std::size_t i = 0; i < tilde_cps.size(); ++i) {
    if (match(base_cps, tilde_cps[i].position) < 0) fresh.push_back(static_cast<int>(i));
  }
  check("exactly two new critical points", fresh.size() == 2, std::to_string(fresh.size()) + " new");
  if (fresh.size() == 2) {
    const auto& a = tilde_cps[fresh[0]];
    const auto& b = tilde_cps[fresh[1]];
    const bool one_each = a.is_extremum() != b.is_extremum();
    check("one new extremum and one new saddle", one_each);
    check("new points lie in the patch", patch.contains(a.position) && patch.contains(b.position));
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto* c : {&a, &b}) {
      for (double e : c->hess_eigenvalues) smallest = std::min(smallest, std::abs(e));
    }
    check("new points are non-degenerate", smallest > 1e-8, "smallest |Hessian eigenvalue| " + std::to_string(smallest));
    if (one_each) {
      const bool want_max = patch.amplitude > 0.0;
      const auto& ext = a.is_extremum() ? a : b;
      check(want_max ? "new extremum is a maximum" : "new extremum is a minimum",
            ext.kind == (want_max ? CriticalKind::Maximum : CriticalKind::Minimum));
    }
  }

  NeumannComplex cx = build_complex(field_tilde, tilde_cps, opts);
  check("perturbed field is Morse-Smale", cx.morse_smale);
  for (int i : fresh) {
    if (cx.criticals[i].is_extremum()) {
      r.new_extremum = i;
    } else {
      r.new_saddle = i;
    }
  }
  if (r.new_extremum >= 0) {
    const int deg = degree(cx, r.new_extremum);
    check("new extremum has degree one", deg == 1, "degree " + std::to_string(deg));
    for (std::size_t l = 0; l < cx.lines.size(); ++l) {
      if (cx.lines[l].end() == r.new_extremum) r.crack_line = static_cast<int>(l);
    }
  }

  // Extrema of the base domain that contains the patch centre.
  int base_max = -1, base_min = -1;
  {
    const NeumannComplex bcx = build_complex(base, base_cps, opts);
    for (const auto& d : bcx.domains) {
      bool inside = false;
      for (int i = -1; i <= 1 && !inside; ++i) {
        for (int j = -1; j <= 1 && !inside; ++j) {
          inside = winding_number(d.outline, patch.center + kTwoPi * Vec2(i, j)) != 0;
        }
      }
      if (inside) {
        base_max = match(tilde_cps, bcx.criticals[d.max_point].position);
        base_min = match(tilde_cps, bcx.criticals[d.min_point].position);
        break;
      }
    }
    check("patch lies in a base domain", base_max >= 0 && base_min >= 0);
  }
  if (r.new_saddle >= 0 && r.new_extremum >= 0 && base_max >= 0) {
    std::vector<int> up, down;
    for (const auto& line : cx.lines) {
      if (line.saddle != r.new_saddle) continue;
      (cx.criticals[line.end()].kind == CriticalKind::Maximum ? up : down).push_back(line.end());
    }
    std::sort(up.begin(), up.end());
    std::sort(down.begin(), down.end());
    const bool new_is_max = cx.criticals[r.new_extremum].kind == CriticalKind::Maximum;
    std::vector<int> want_up = new_is_max ? std::vector<int>{base_max, r.new_extremum} : std::vector<int>{base_max, base_max};
    std::vector<int> want_down = new_is_max ? std::vector<int>{base_min, base_min} : std::vector<int>{base_min, r.new_extremum};
    std::sort(want_up.begin(), want_up.end());
    std::sort(want_down.begin(), want_down.end());
    check("new saddle's uphill lines end at the expected maxima", up == want_up);
    check("new saddle's downhill lines end at the expected minima", down == want_down);
  }

  for (const auto& d : cx.domains) r.cracked_domains += d.classification == DomainClass::Cracked;
  check("exactly one cracked domain", r.cracked_domains == 1, std::to_string(r.cracked_domains) + " cracked");

  // Equality outside the patch on a grid over the torus.
  double diff = 0.0;
  const int n = 256;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 x(kTwoPi * (i + 0.5) / n, kTwoPi * (j + 0.5) / n);
      if (patch.contains(x)) continue;
      diff = std::max(diff, std::abs(field_tilde.value(x) - base.value(x)));
    }
  }
  r.max_outside_difference = diff;
  check("field unchanged outside the patch", diff == 0.0);

  r.complex = std::move(cx);
  for (const auto& c : r.checks) {
    if (!c.passed) {
      throw Error(ErrorCode::ConstructionFailed, c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    }
  }
  return r;
}

}  // namespace neumann
