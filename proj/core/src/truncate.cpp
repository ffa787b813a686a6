#include "neumann/truncate.hpp"

#include "neumann/error.hpp"

#include <algorithm>
#include <cmath>

namespace neumann {

namespace {

struct Loop {
  Polyline pts;
  std::vector<BoundaryMarker> markers;
  std::vector<int> corner;  // critical id, -2 for a plain corner, -1 otherwise
};

Loop to_loop(const DomainGeometry& g) {
  Loop l{g.outer, g.markers, std::vector<int>(g.outer.size(), -1)};
  for (std::size_t k = 0; k < g.corners.size(); ++k) l.corner[g.corners[k]] = g.corner_critical[k];
  return l;
}

void from_loop(const Loop& l, DomainGeometry& g) {
  g.outer = l.pts;
  g.markers = l.markers;
  g.corners.clear();
  g.corner_critical.clear();
  for (std::size_t i = 0; i < l.pts.size(); ++i) {
    if (l.corner[i] == -1) continue;
    g.corners.push_back(i);
    g.corner_critical.push_back(l.corner[i] >= 0 ? l.corner[i] : -1);
  }
}

struct Crossing {
  std::size_t seg;  // segment pts[seg] -> pts[seg+1] (in loop order)
  Vec2 point;
};

// First point along the loop from `start` in direction `dir` where f passes level c.
Crossing find_crossing(const MorseField& f, const Polyline& pts, std::size_t start, int dir, double c) {
  const std::size_t n = pts.size();
  const double s0 = f.value(pts[start]) - c;
  std::size_t i = start;
  for (std::size_t steps = 0; steps < n; ++steps) {
    const std::size_t j = (i + n + dir) % n;
    const double vj = f.value(pts[j]) - c;
    if ((vj > 0) != (s0 > 0)) {
      Vec2 lo = pts[i], hi = pts[j];
      for (int it = 0; it < 80; ++it) {
        const Vec2 mid = 0.5 * (lo + hi);
        if ((f.value(mid) - c > 0) == (s0 > 0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return {dir > 0 ? i : j, 0.5 * (lo + hi)};
    }
    i = j;
  }
  throw Error(ErrorCode::ExceptionalLevel, "level line does not meet the domain boundary");
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Level line f = c from `from` (on segment `from_seg`) to `to` (on segment `to_seg`).
Polyline trace_level(const MorseField& f, double c, const Polyline& loop, const Crossing& from,
                     const Crossing& to) {
  const std::size_t n = loop.size();
  const Vec2 tangent = loop[(from.seg + 1) % n] - loop[from.seg];
  const Vec2 inward(-tangent.y(), tangent.x());
  const Vec2 g0 = f.gradient(from.point);
  const double sign = Vec2(-g0.y(), g0.x()).dot(inward) >= 0.0 ? 1.0 : -1.0;
  auto dir = [&](const Vec2& x) {
    const Vec2 g = f.gradient(x);
    return Vec2(Vec2(-g.y(), g.x()) * (sign / g.norm()));
  };
  auto project = [&](Vec2 x) {
    for (int it = 0; it < 4; ++it) {
      const Vec2 g = f.gradient(x);
      x -= (f.value(x) - c) * g / g.squaredNorm();
    }
    return x;
  };
  const double gap = (to.point - from.point).norm();
  const double ds = std::clamp(gap / 100.0, 1e-9, 1e-3);
  Polyline out{from.point};
  Vec2 x = from.point;
  const std::size_t window = 64;
  for (int step = 0; step < 2000000; ++step) {
    const Vec2 k1 = dir(x);
    const Vec2 k2 = dir(x + 0.5 * ds * k1);
    const Vec2 k3 = dir(x + 0.5 * ds * k2);
    const Vec2 k4 = dir(x + ds * k3);
    const Vec2 y = project(x + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if ((y - to.point).norm() < 1.5 * ds) {
      out.push_back(to.point);
      return out;
    }
    for (std::size_t w = 0; w < 2 * window; ++w) {
      const std::size_t i = (to.seg + n + w - window) % n;
      if (segments_cross(x, y, loop[i], loop[(i + 1) % n])) {
        if ((y - to.point).norm() > 0.1 * gap + 10.0 * ds) {
          throw Error(ErrorCode::ExceptionalLevel, "level line left the domain away from its end point");
        }
        out.push_back(to.point);
        return out;
      }
    }
    if (step > 2) {
      for (std::size_t w = 0; w < 2 * window; ++w) {
        const std::size_t i = (from.seg + n + w - window) % n;
        if (segments_cross(x, y, loop[i], loop[(i + 1) % n])) {
          throw Error(ErrorCode::ExceptionalLevel, "level line returned to its start side");
        }
      }
    }
    out.push_back(y);
    x = y;
    if (out.size() > 200 && polyline_length(out) > 50.0 * gap + 1.0) break;
  }
  throw Error(ErrorCode::ExceptionalLevel, "level line did not close up across the domain");
}

double end_angle(const Polyline& gamma, bool at_start, const Vec2& boundary_dir) {
  const std::size_t n = gamma.size();
  const std::size_t k = std::min<std::size_t>(3, n - 1);
  const Vec2 t = at_start ? gamma[k] - gamma[0] : gamma[n - 1 - k] - gamma[n - 1];
  const double a = angle_between(t, boundary_dir);
  return std::min(a, kPi - a);
}

// Replaces the loop around the corner at `corner` with the level line f = c.
Polyline cut(const MorseField& f, Loop& l, std::size_t corner, double c, BoundaryMarker marker,
             std::vector<double>& angles) {
  const std::size_t n = l.pts.size();
  const Crossing fwd = find_crossing(f, l.pts, corner, +1, c);
  const Crossing bwd = find_crossing(f, l.pts, corner, -1, c);
  const Polyline gamma = trace_level(f, c, l.pts, bwd, fwd);
  angles.push_back(end_angle(gamma, true, l.pts[(bwd.seg + 1) % n] - l.pts[bwd.seg]));
  angles.push_back(end_angle(gamma, false, l.pts[(fwd.seg + 1) % n] - l.pts[fwd.seg]));

  // Keep fwd.seg+1 ... bwd.seg, then the level line from bwd to fwd.
  Loop out;
  auto push = [&](const Vec2& p, BoundaryMarker m, int cflag) {
    out.pts.push_back(p);
    out.markers.push_back(m);
    out.corner.push_back(cflag);
  };
  push(fwd.point, l.markers[fwd.seg], -2);
  for (std::size_t i = (fwd.seg + 1) % n;; i = (i + 1) % n) {
    if ((l.pts[i] - fwd.point).norm() > 1e-14 && (l.pts[i] - bwd.point).norm() > 1e-14) {
      push(l.pts[i], l.markers[i], l.corner[i]);
    }
    if (i == bwd.seg) break;
  }
  push(bwd.point, marker, -2);
  for (std::size_t k = 1; k + 1 < gamma.size(); ++k) push(gamma[k], marker, -1);
  l = std::move(out);
  return gamma;
}

}  // namespace

TruncatedDomain truncate_domain(const NeumannComplex& complex, int domain, double t, double h_min) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::InvalidArgument, "truncation level must lie in (0, 1)");
  if (domain < 0 || domain >= static_cast<int>(complex.domains.size())) {
    throw Error(ErrorCode::InvalidArgument, "no domain " + std::to_string(domain));
  }
  const auto& d = complex.domains[static_cast<std::size_t>(domain)];
  const auto& f = complex.field;
  const double fmax = complex.criticals[d.max_point].value;
  const double fmin = complex.criticals[d.min_point].value;
  if (!(fmin < 0.0 && 0.0 < fmax)) {
    throw Error(ErrorCode::InvalidArgument, "domain extrema must have opposite signs");
  }

  TruncatedDomain out;
  out.parent = domain;
  out.t = t;
  bool max_cusp = false, min_cusp = false;
  for (const auto& c : d.cusps) {
    max_cusp = max_cusp || c.critical == d.max_point;
    min_cusp = min_cusp || c.critical == d.min_point;
  }
  if (!max_cusp && !min_cusp) {
    out.geometry = domain_geometry(complex, domain, h_min);
    return out;
  }

  DomainGeometry g = domain_geometry(complex, domain, h_min, false);
  for (int s : d.saddles) {
    const double fs = complex.criticals[s].value;
    const double tol = 1e-6 * (fmax - fmin);
    if ((max_cusp && std::abs(fs - t * fmax) < tol) || (min_cusp && std::abs(fs - t * fmin) < tol)) {
      throw Error(ErrorCode::ExceptionalLevel, "level line runs through a saddle; perturb t");
    }
  }
  Loop l = to_loop(g);
  auto corner_of = [&](int crit) {
    for (std::size_t i = 0; i < l.pts.size(); ++i) {
      if (l.corner[i] == crit) return i;
    }
    throw Error(ErrorCode::InvalidArgument, "cusped extremum is not on the outer boundary");
  };
  if (max_cusp) {
    out.gamma_plus = cut(f, l, corner_of(d.max_point), t * fmax, BoundaryMarker::GammaPlus, out.end_angles);
  }
  if (min_cusp) {
    out.gamma_minus = cut(f, l, corner_of(d.min_point), t * fmin, BoundaryMarker::GammaMinus, out.end_angles);
  }
  from_loop(l, g);
  // Keep grading toward the removed tips without exempting any triangles.
  g.cusps.clear();
  g.cusp_radii.clear();
  if (max_cusp) g.cusps.push_back(out.gamma_plus[out.gamma_plus.size() / 2]);
  if (min_cusp) g.cusps.push_back(out.gamma_minus[out.gamma_minus.size() / 2]);
  g.cusp_radii.assign(g.cusps.size(), 0.0);
  out.geometry = std::move(g);
  return out;
}

std::vector<CuspDecay> cusp_length_decay(const NeumannComplex& complex, int domain, const std::vector<double>& ts) {
  if (domain < 0 || domain >= static_cast<int>(complex.domains.size()) ||
      complex.domains[static_cast<std::size_t>(domain)].cusps.empty()) {
    throw Error(ErrorCode::InvalidArgument, "domain has no cusp");
  }
  std::vector<CuspDecay> out;
  for (double t : ts) {
    const TruncatedDomain td = truncate_domain(complex, domain, t);
    CuspDecay c;
    c.t = t;
    c.length_plus = td.gamma_plus.empty() ? 0.0 : polyline_length(td.gamma_plus);
    c.length_minus = td.gamma_minus.empty() ? 0.0 : polyline_length(td.gamma_minus);
    c.normalized_plus = c.length_plus / std::sqrt(1.0 - t);
    c.normalized_minus = c.length_minus / std::sqrt(1.0 - t);
    out.push_back(c);
  }
  return out;
}

}  // namespace neumann
