#include "neumann/complex.hpp"

#include "neumann/error.hpp"

#include <algorithm>
#include <cmath>

namespace neumann {

std::vector<double> angles_at(const NeumannComplex& complex, int critical) {
  const int deg = degree(complex, critical);
  if (deg < 2) throw Error(ErrorCode::DegreeTooSmall, "angles need at least two incident lines");
  const auto& ends = complex.incidence[critical];
  std::vector<double> out(deg);
  for (int k = 0; k < deg; ++k) {
    const auto& a = ends[k];
    const auto& b = ends[(k + 1) % deg];
    // Gap in the cyclic order (robust even when tangents coincide at a cusp).
    double order_gap = b.order_angle - a.order_angle;
    order_gap -= kTwoPi * std::floor((order_gap + 0.5) / kTwoPi);
    // Tangent gap, taken in the branch closest to the order gap.
    double gap = b.tangent_angle - a.tangent_angle;
    gap += kTwoPi * std::round((order_gap - gap) / kTwoPi);
    out[k] = gap;
  }
  return out;
}

double cusp_exponent(const CriticalPoint& c) {
  if (!c.is_extremum()) throw Error(ErrorCode::InvalidArgument, "cusps occur only at extrema");
  const double a = std::abs(c.hess_eigenvalues[0]);
  const double b = std::abs(c.hess_eigenvalues[1]);
  if (c.hess_proportional) throw Error(ErrorCode::ProportionalHessian, "Hessian proportional to the metric");
  return std::max(a, b) / std::min(a, b);
}

namespace {

// Slow/fast coordinates of a line end, restricted to the part that is a graph over the slow axis.
struct Graph {
  std::vector<double> x;
  std::vector<double> y;
};

Graph as_graph(const Polyline& local, const Vec2& slow, const Vec2& fast, double radius) {
  Graph g;
  // Orient the slow axis along the line's direction of departure.
  Vec2 dir = Vec2::Zero();
  for (const auto& p : local) {
    if (p.norm() > 1e-6) {
      dir = p;
      break;
    }
  }
  const double sgn = dir.dot(slow) >= 0.0 ? 1.0 : -1.0;
  double last = 0.0;
  for (const auto& p : local) {
    const double x = sgn * p.dot(slow);
    if (p.norm() > radius * 1.5) break;
    if (x <= last && !g.x.empty()) break;
    if (x <= 0.0) continue;
    g.x.push_back(x);
    g.y.push_back(p.dot(fast));
    last = x;
  }
  return g;
}

double interp(const Graph& g, double x) {
  const auto it = std::lower_bound(g.x.begin(), g.x.end(), x);
  if (it == g.x.begin()) return g.y.front();
  if (it == g.x.end()) return g.y.back();
  const auto i = static_cast<std::size_t>(it - g.x.begin());
  const double w = (x - g.x[i - 1]) / (g.x[i] - g.x[i - 1]);
  return (1.0 - w) * g.y[i - 1] + w * g.y[i];
}

}  // namespace

CuspFit fit_cusp_gap(const NeumannComplex& complex, int critical, int line_a, bool a_at_start,
                     int line_b, bool b_at_start, double inner, double radius) {
  const auto& cp = complex.criticals.at(critical);
  const int s = cp.slow_index();
  const Vec2 slow = cp.hess_eigenvectors[s];
  const Vec2 fast = cp.hess_eigenvectors[1 - s];
  const Graph ga = as_graph(local_polyline(complex, line_a, a_at_start, true), slow, fast, radius);
  const Graph gb = as_graph(local_polyline(complex, line_b, b_at_start, true), slow, fast, radius);
  CuspFit fit;
  if (ga.x.size() < 2 || gb.x.size() < 2) return fit;
  const double lo = std::max({inner, ga.x.front(), gb.x.front()});
  const double hi = std::min({radius, ga.x.back(), gb.x.back()});
  if (!(hi > lo * 1.5)) return fit;
  const int n = 40;
  std::vector<double> lx, ly;
  for (int k = 0; k < n; ++k) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    const double gap = std::abs(interp(ga, x) - interp(gb, x));
    if (gap <= 0.0) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(gap));
  }
  const auto m = static_cast<double>(lx.size());
  if (lx.size() < 3) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double cov = sxy - sx * sy / m;
  const double varx = sxx - sx * sx / m;
  const double vary = syy - sy * sy / m;
  fit.slope = cov / varx;
  fit.r_squared = vary > 0.0 ? cov * cov / (varx * vary) : 0.0;
  fit.samples = static_cast<int>(lx.size());
  return fit;
}

}  // namespace neumann
