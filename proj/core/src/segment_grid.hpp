#pragma once

#include "neumann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace neumann::detail {

/// Uniform bucket grid over the torus for segment proximity queries.
/// Segments are given in lifted coordinates; bucketing is done modulo 2pi.
class TorusSegmentGrid {
 public:
  struct Segment {
    Vec2 a;
    Vec2 b;
    int owner;
    int index;
  };

  explicit TorusSegmentGrid(int cells) : n_(cells), cell_(kTwoPi / cells), buckets_(cells * cells) {}

  void insert(const Vec2& a, const Vec2& b, int owner, int index) {
    const Vec2 shift(kTwoPi * std::floor(a.x() / kTwoPi), kTwoPi * std::floor(a.y() / kTwoPi));
    const Segment s{a - shift, b - shift, owner, index};
    const int id = static_cast<int>(segments_.size());
    segments_.push_back(s);
    for_cells(s.a, s.b, [&](int cx, int cy) { buckets_[cy * n_ + cx].push_back(id); });
  }

  /// Calls fn(segment, shifted_a, shifted_b) for stored segments near (a, b), with
  /// the stored segment translated to the lift nearest to `a`. Duplicates possible.
  template <class Fn>
  void query(const Vec2& a, const Vec2& b, double pad, Fn&& fn) const {
    const Vec2 shift(kTwoPi * std::floor(a.x() / kTwoPi), kTwoPi * std::floor(a.y() / kTwoPi));
    const Vec2 qa = a - shift;
    const Vec2 qb = b - shift;
    std::vector<int> seen;
    const Vec2 lo = qa.cwiseMin(qb) - Vec2::Constant(pad);
    const Vec2 hi = qa.cwiseMax(qb) + Vec2::Constant(pad);
    for_cells(lo, hi, [&](int cx, int cy) {
      for (int id : buckets_[cy * n_ + cx]) seen.push_back(id);
    });
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (int id : seen) {
      const Segment& s = segments_[id];
      const Vec2 off = torus_delta(qa, s.a) - (s.a - qa);
      fn(s, s.a + off + shift, s.b + off + shift);
    }
  }

  const std::vector<Segment>& segments() const { return segments_; }

 private:
  template <class Fn>
  void for_cells(const Vec2& p, const Vec2& q, Fn&& fn) const {
    const Vec2 lo = p.cwiseMin(q);
    const Vec2 hi = p.cwiseMax(q);
    const int x0 = static_cast<int>(std::floor(lo.x() / cell_));
    const int x1 = static_cast<int>(std::floor(hi.x() / cell_));
    const int y0 = static_cast<int>(std::floor(lo.y() / cell_));
    const int y1 = static_cast<int>(std::floor(hi.y() / cell_));
    for (int cy = y0; cy <= y1 && cy - y0 < n_; ++cy) {
      for (int cx = x0; cx <= x1 && cx - x0 < n_; ++cx) {
        fn(((cx % n_) + n_) % n_, ((cy % n_) + n_) % n_);
      }
    }
  }

  int n_;
  double cell_;
  std::vector<std::vector<int>> buckets_;
  std::vector<Segment> segments_;
};

/// Proper intersection point of segments ab and cd, if any.
inline std::optional<Vec2> segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c,
                                                const Vec2& d) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + t * r;
}

}  // namespace neumann::detail
