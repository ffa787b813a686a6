#include "neumann/geometry.hpp"

#include <algorithm>

namespace neumann {

double polyline_length(std::span<const Vec2> pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

double signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

int winding_number(std::span<const Vec2> poly, const Vec2& p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double side = cross(b - a, p - a);
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && side > 0.0) ++wn;
    } else if (b.y() <= p.y() && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

Vec2 point_at_arclength(std::span<const Vec2> pts, double s) {
  if (pts.empty()) return Vec2::Zero();
  if (s <= 0.0) return pts.front();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = (pts[i] - pts[i - 1]).norm();
    if (s <= seg && seg > 0.0) return pts[i - 1] + (s / seg) * (pts[i] - pts[i - 1]);
    s -= seg;
  }
  return pts.back();
}

Polyline resample_uniform(std::span<const Vec2> pts, double spacing) {
  Polyline out;
  if (pts.empty()) return out;
  const double total = polyline_length(pts);
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / spacing - 1e-9)));
  const double step = total / static_cast<double>(pieces);
  out.reserve(pieces + 1);
  out.push_back(pts.front());
  std::size_t seg = 1;
  double seg_start = 0.0;
  for (std::size_t k = 1; k < pieces; ++k) {
    const double target = step * static_cast<double>(k);
    while (seg < pts.size()) {
      const double len = (pts[seg] - pts[seg - 1]).norm();
      if (seg_start + len >= target && len > 0.0) {
        const double w = (target - seg_start) / len;
        out.push_back(pts[seg - 1] + w * (pts[seg] - pts[seg - 1]));
        break;
      }
      seg_start += len;
      ++seg;
    }
  }
  out.push_back(pts.back());
  return out;
}

}  // namespace neumann
