#pragma once

#include "neumann/geometry.hpp"

#include <array>
#include <functional>
#include <vector>

namespace neumann::detail {

/// Incremental constrained Delaunay triangulation (Lawson flips) with
/// Sloan-style edge recovery and circumcentre refinement.
class Cdt {
 public:
  struct Triangle {
    std::array<int, 3> v{};
    /// nbr[k] is across the edge opposite v[k]; -1 on the hull.
    std::array<int, 3> nbr{-1, -1, -1};
    std::array<bool, 3> fixed{false, false, false};
    bool alive = true;
    bool outside = false;
  };

  /// Starts from a super-triangle enclosing the box [lo, hi].
  Cdt(const Vec2& lo, const Vec2& hi);

  /// Inserts a point; returns the id of an existing vertex closer than `merge`.
  int insert(const Vec2& p, double merge = 0.0);

  /// Forces the edge (a, b) into the triangulation and marks it fixed.
  /// No vertex may lie strictly inside the segment.
  void constrain(int a, int b);

  /// True if p falls in a triangle that has not been carved away.
  bool inside(const Vec2& p) const;

  /// Flips non-fixed edges until every one is locally Delaunay.
  void restore_delaunay();

  /// Marks as outside every triangle reachable from the super-triangle
  /// without crossing a fixed edge.
  void carve();

  /// Circumcentre refinement of alive triangles. A triangle is split when
  /// its smallest angle is below `min_angle` or `too_big` returns true;
  /// `skip` excludes triangles from both tests. Fixed edges encroached by a
  /// candidate are bisected instead, with the midpoint passed to `on_split`.
  struct RefineOptions {
    double min_angle_deg = 20.0;
    double min_edge = 0.0;
    std::size_t max_vertices = 400000;
    std::function<bool(const Vec2&, double)> too_big;
    std::function<bool(const Vec2&)> skip;
    std::function<void(int a, int b, int mid)> on_split;
  };
  void refine(const RefineOptions& opts);

  /// Laplacian smoothing of movable vertices (external ids), re-flipping after each pass.
  void smooth(const std::vector<char>& movable, int passes);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Triangle>& triangles() const { return tris_; }
  bool is_super(int v) const { return v < 3; }

  /// Alive inside triangles as positively oriented vertex triples (ids shifted
  /// so that the super vertices are dropped: returned id = internal id - 3).
  std::vector<std::array<int, 3>> inside_triangles() const;

  static double min_angle(const Vec2& a, const Vec2& b, const Vec2& c);

 private:
  int locate(const Vec2& p, int start) const;
  int new_triangle(int a, int b, int c);
  void set_nbr(int t, int a, int b, int other);
  int edge_index(int t, int a, int b) const;
  void flip(int t, int k);
  void legalize(int t, int k);
  int split_triangle(int t, const Vec2& p);
  int split_edge(int t, int k, const Vec2& p);
  bool find_edge(int a, int b, int& t, int& k) const;
  std::vector<int> triangles_around(int v) const;
  void mark_fixed(int a, int b);

  std::vector<Vec2> pts_;
  std::vector<Triangle> tris_;
  std::vector<int> vtri_;
  int last_ = 0;
};

}  // namespace neumann::detail
