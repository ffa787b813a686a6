#include "neumann/mesh.hpp"

#include "neumann/error.hpp"
#include "neumann/truncate.hpp"

#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace neumann {

const char* to_string(BoundaryMarker m) {
  switch (m) {
    case BoundaryMarker::Boundary: return "boundary";
    case BoundaryMarker::GammaPlus: return "gamma_plus";
    case BoundaryMarker::GammaMinus: return "gamma_minus";
    case BoundaryMarker::CrackLeft: return "crack_left";
    case BoundaryMarker::CrackRight: return "crack_right";
  }
  return "unknown";
}

double TriMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    a += 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
  }
  return a;
}

double TriMesh::min_angle() const {
  double m = kPi;
  for (const auto& t : triangles) {
    m = std::min(m, detail::Cdt::min_angle(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  }
  return m;
}

double TriMesh::smallest_edge() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) m = std::min(m, (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm());
  }
  return m;
}

namespace {

// Bucketed segment set in the plane for proximity and crossing queries.
class SegmentBuckets {
 public:
  explicit SegmentBuckets(double cell) : cell_(cell) {}

  void add(const Vec2& a, const Vec2& b) {
    const int id = static_cast<int>(segs_.size());
    segs_.push_back({a, b});
    visit(a.cwiseMin(b), a.cwiseMax(b), [&](long long key) { cells_[key].push_back(id); });
  }

  double distance(const Vec2& p, double radius) const {
    double best = std::numeric_limits<double>::infinity();
    visit(p - Vec2::Constant(radius), p + Vec2::Constant(radius), [&](long long key) {
      const auto it = cells_.find(key);
      if (it == cells_.end()) return;
      for (int id : it->second) best = std::min(best, point_segment_distance(p, segs_[id][0], segs_[id][1]));
    });
    return best;
  }

  /// Some pair of segments crossing away from shared endpoints, if any.
  bool has_crossing(Vec2* where) const {
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      const Vec2& a = segs_[i][0];
      const Vec2& b = segs_[i][1];
      bool found = false;
      visit(a.cwiseMin(b), a.cwiseMax(b), [&](long long key) {
        if (found) return;
        for (int j : cells_.at(key)) {
          if (j <= static_cast<int>(i)) continue;
          const Vec2& c = segs_[j][0];
          const Vec2& d = segs_[j][1];
          const double tol = 1e-12 * std::max(1.0, (b - a).norm());
          if ((a - c).norm() < tol || (a - d).norm() < tol || (b - c).norm() < tol || (b - d).norm() < tol) {
            continue;
          }
          const double d1 = cross(b - a, c - a);
          const double d2 = cross(b - a, d - a);
          const double d3 = cross(d - c, a - c);
          const double d4 = cross(d - c, b - c);
          if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) {
            if (where) *where = a;
            found = true;
            return;
          }
        }
      });
      if (found) return true;
    }
    return false;
  }

 private:
  template <class Fn>
  void visit(const Vec2& lo, const Vec2& hi, Fn&& fn) const {
    const auto x0 = static_cast<long long>(std::floor(lo.x() / cell_));
    const auto x1 = static_cast<long long>(std::floor(hi.x() / cell_));
    const auto y0 = static_cast<long long>(std::floor(lo.y() / cell_));
    const auto y1 = static_cast<long long>(std::floor(hi.y() / cell_));
    for (long long y = y0; y <= y1; ++y) {
      for (long long x = x0; x <= x1; ++x) fn(x * 1000003LL + y);
    }
  }

  double cell_;
  std::vector<std::array<Vec2, 2>> segs_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

struct Sizing {
  double h;
  double h_min;
  double grading;
  const std::vector<Vec2>* cusps;

  double operator()(const Vec2& p) const {
    if (cusps->empty() || grading <= 1.0) return h;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : *cusps) d = std::min(d, (p - c).norm());
    return std::min(h, h_min + (grading - 1.0) * d);
  }
};

// Resamples a polyline with spacing following the sizing function; ends are kept.
Polyline resample_sized(std::span<const Vec2> pts, const Sizing& size) {
  const double len = polyline_length(pts);
  if (len <= 0.0) return {pts.front(), pts.back()};
  std::vector<double> marks{0.0};
  double step = size(pts.front());
  while (marks.back() + step < len) {
    marks.push_back(marks.back() + step);
    step = size(point_at_arclength(pts, marks.back()));
  }
  // Stretch or shrink so the last interval is not a sliver.
  double total = marks.back() + step;
  if (len - marks.back() < 0.5 * step && marks.size() > 1) {
    total = marks.back();
    marks.pop_back();
  }
  Polyline out;
  for (double m : marks) out.push_back(point_at_arclength(pts, m * len / total));
  out.push_back(pts.back());
  return out;
}

}  // namespace

namespace {

struct Piece {
  Polyline pts;
  int line;
  bool forward;
};

// Arclength parametrisation of one side of a cusp.
Vec2 along(const Polyline& loop, std::size_t start, int dir, double s) {
  const std::size_t n = loop.size();
  double acc = 0.0;
  std::size_t i = start;
  for (std::size_t steps = 0; steps < n; ++steps) {
    const std::size_t j = (i + n + dir) % n;
    const double seg = (loop[j] - loop[i]).norm();
    if (acc + seg >= s) return loop[i] + (s - acc) / seg * (loop[j] - loop[i]);
    acc += seg;
    i = j;
  }
  return loop[i];
}

// Index of the first vertex strictly beyond arclength s along one side.
std::size_t index_beyond(const Polyline& loop, std::size_t start, int dir, double s) {
  const std::size_t n = loop.size();
  double acc = 0.0;
  std::size_t i = start;
  for (std::size_t steps = 0; steps < n; ++steps) {
    const std::size_t j = (i + n + dir) % n;
    acc += (loop[j] - loop[i]).norm();
    if (acc > s) return j;
    i = j;
  }
  return i;
}

}  // namespace

DomainGeometry domain_geometry(const NeumannComplex& complex, int domain, double h_min, bool cut_cusps) {
  if (domain < 0 || domain >= static_cast<int>(complex.domains.size())) {
    throw Error(ErrorCode::InvalidArgument, "no domain " + std::to_string(domain));
  }
  const auto& d = complex.domains[static_cast<std::size_t>(domain)];
  std::vector<Piece> pieces;
  Vec2 lift = complex.criticals[origin_of(complex, d.boundary.front())].position;
  for (const auto& he : d.boundary) {
    Polyline pts = half_edge_samples(complex, he);
    const Vec2 shift = lift - pts.front();
    for (auto& p : pts) p += shift;
    lift = pts.back();
    pieces.push_back({std::move(pts), he.line, he.forward});
  }

  DomainGeometry g;
  // A crack line is walked out and straight back; split those pairs off as slits.
  bool removed = true;
  while (removed && pieces.size() > 2) {
    removed = false;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::size_t j = (i + 1) % pieces.size();
      if (pieces[i].line != pieces[j].line || pieces[i].forward == pieces[j].forward) continue;
      g.slits.push_back(pieces[i].pts);
      if (j > i) {
        pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i),
                     pieces.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      } else {
        pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
        pieces.erase(pieces.begin());
      }
      removed = true;
      break;
    }
  }

  std::vector<std::size_t> piece_start;
  for (const auto& pc : pieces) {
    piece_start.push_back(g.outer.size());
    g.corners.push_back(g.outer.size());
    g.corner_critical.push_back(origin_of(complex, {pc.line, pc.forward}));
    for (std::size_t k = 0; k + 1 < pc.pts.size(); ++k) g.outer.push_back(pc.pts[k]);
  }
  g.markers.assign(g.outer.size(), BoundaryMarker::Boundary);

  // Cut each cusp tip where the two sides are closer than the smallest element.
  std::vector<std::pair<std::size_t, std::size_t>> cuts;
  for (const auto& c : d.cusps) {
    if (!cut_cusps) break;
    std::size_t corner = g.outer.size();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (pieces[i].line == c.outgoing.line && pieces[i].forward == c.outgoing.forward) corner = piece_start[i];
    }
    if (corner == g.outer.size()) continue;
    // Sides can stay within integration noise of each other for a long way when
    // two lines coalesce, even past the next corner.
    const double reach = 0.45 * polyline_length(g.outer);
    double s = h_min * 1e-3;
    double cut = -1.0;
    double quiet = -1.0;
    Vec2 pinch = g.outer[corner];
    for (; s < reach; s *= 1.05) {
      const Vec2 a = along(g.outer, corner, -1, s);
      const Vec2 b = along(g.outer, corner, +1, s);
      const double w = (a - b).norm();
      if (cut < 0.0 && w >= h_min) {
        cut = s;
        pinch = 0.5 * (a + b);
      }
      if (cut > 0.0 && w >= 4.0 * (h_min + 0.3 * (a - pinch).norm())) {
        quiet = (a - pinch).norm();
        break;
      }
    }
    if (cut < 0.0) {
      throw Error(ErrorCode::MeshQualityFailure, "cusp sides never separate by the smallest element size");
    }
    g.cusps.push_back(pinch);
    g.cusp_radii.push_back(quiet > 0.0 ? quiet : reach);
    cuts.emplace_back(index_beyond(g.outer, corner, -1, cut), index_beyond(g.outer, corner, +1, cut));
  }
  if (!cuts.empty()) {
    // Drop the vertices strictly between each cut pair (walking through the tip).
    const std::size_t n = g.outer.size();
    std::vector<char> drop(n, 0);
    std::vector<int> corner_flag(n, 0);
    std::vector<int> corner_crit(n, -1);
    for (std::size_t k = 0; k < g.corners.size(); ++k) {
      corner_flag[g.corners[k]] = 1;
      corner_crit[g.corners[k]] = g.corner_critical[k];
    }
    for (const auto& [lo, hi] : cuts) {
      for (std::size_t i = (lo + 1) % n; i != hi; i = (i + 1) % n) drop[i] = 1;
      corner_flag[lo] = corner_flag[hi] = 1;
    }
    Polyline outer;
    std::vector<std::size_t> corners;
    std::vector<int> crits;
    for (std::size_t i = 0; i < n; ++i) {
      if (drop[i]) continue;
      if (corner_flag[i]) {
        corners.push_back(outer.size());
        crits.push_back(corner_crit[i]);
      }
      outer.push_back(g.outer[i]);
    }
    g.outer = std::move(outer);
    g.corners = std::move(corners);
    g.corner_critical = std::move(crits);
    g.markers.assign(g.outer.size(), BoundaryMarker::Boundary);
  }
  return g;
}

TriMesh mesh_geometry(const DomainGeometry& geometry, const MeshOptions& opts) {
  if (!(opts.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "mesh size must be positive");
  if (geometry.outer.size() < 3) throw Error(ErrorCode::InvalidArgument, "boundary has fewer than 3 points");
  const double h = opts.h;
  const double h_min = h * opts.h_min_ratio;
  const Sizing size{h, h_min, opts.grading, &geometry.cusps};

  // Resample the outer loop piecewise between corners.
  struct Seg {
    int a, b;
    BoundaryMarker marker;
    bool slit;
  };
  std::vector<Vec2> bpts;
  std::vector<BoundaryMarker> bmark;
  const std::size_t n = geometry.outer.size();
  std::vector<std::size_t> corners = geometry.corners;
  if (corners.empty()) corners.push_back(0);
  std::sort(corners.begin(), corners.end());
  for (std::size_t c = 0; c < corners.size(); ++c) {
    const std::size_t i0 = corners[c];
    const std::size_t i1 = corners[(c + 1) % corners.size()];
    // Split further where the marker changes.
    Polyline run{geometry.outer[i0]};
    BoundaryMarker m = geometry.markers[i0];
    auto flush = [&]() {
      const Polyline r = resample_sized(run, size);
      for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        bpts.push_back(r[k]);
        bmark.push_back(m);
      }
    };
    std::size_t i = i0;
    do {
      const std::size_t j = (i + 1) % n;
      if (geometry.markers[i] != m) {
        flush();
        run = {geometry.outer[i]};
        m = geometry.markers[i];
      }
      run.push_back(geometry.outer[j]);
      i = j;
    } while (i != i1);
    flush();
  }

  SegmentBuckets buckets(std::max(h, 1e-6));
  for (std::size_t i = 0; i < bpts.size(); ++i) buckets.add(bpts[i], bpts[(i + 1) % bpts.size()]);
  std::vector<Polyline> slits;
  for (const auto& s : geometry.slits) {
    slits.push_back(resample_sized(s, size));
    for (std::size_t i = 1; i < slits.back().size(); ++i) buckets.add(slits.back()[i - 1], slits.back()[i]);
  }
  Vec2 where;
  if (buckets.has_crossing(&where)) {
    throw Error(ErrorCode::SelfIntersectingBoundary,
                "domain boundary crosses itself near (" + std::to_string(where.x()) + ", " +
                    std::to_string(where.y()) + ")");
  }

  Vec2 lo = bpts.front(), hi = bpts.front();
  for (const auto& p : bpts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  detail::Cdt cdt(lo, hi);
  const double merge = 1e-12 * std::max(1.0, (hi - lo).norm());
  std::vector<int> bid;
  for (const auto& p : bpts) bid.push_back(cdt.insert(p, merge));
  std::map<std::pair<int, int>, Seg> segs;  // keyed by (min, max)
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (std::size_t i = 0; i < bid.size(); ++i) {
    const int a = bid[i];
    const int b = bid[(i + 1) % bid.size()];
    segs[key(a, b)] = {a, b, bmark[i], false};
  }
  for (const auto& s : slits) {
    int prev = cdt.insert(s.front(), merge);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const int cur = cdt.insert(s[i], merge);
      segs[key(prev, cur)] = {prev, cur, BoundaryMarker::CrackLeft, true};
      prev = cur;
    }
  }
  for (const auto& [k, s] : segs) cdt.constrain(s.a, s.b);
  cdt.restore_delaunay();
  cdt.carve();

  // Interior lattice where the target size is uniform.
  const double row = h * std::sqrt(3.0) / 2.0;
  for (int j = 0; lo.y() + j * row <= hi.y(); ++j) {
    for (int i = 0; lo.x() + (i + 0.5 * (j % 2)) * h <= hi.x(); ++i) {
      const Vec2 p(lo.x() + (i + 0.5 * (j % 2)) * h, lo.y() + j * row);
      if (size(p) < 0.99 * h) continue;
      if (buckets.distance(p, h) < 0.55 * h) continue;
      if (!cdt.inside(p)) continue;
      cdt.insert(p);
    }
  }

  auto in_cusp = [&](const Vec2& p) {
    for (std::size_t c = 0; c < geometry.cusps.size(); ++c) {
      if ((p - geometry.cusps[c]).norm() < geometry.cusp_radii[c]) return true;
    }
    return false;
  };
  detail::Cdt::RefineOptions ro;
  ro.min_angle_deg = std::max(opts.refine_angle_deg, opts.min_angle_deg);
  ro.min_edge = 0.25 * h_min;
  ro.max_vertices = opts.max_vertices;
  ro.too_big = [&](const Vec2& p, double longest) { return longest > 1.5 * size(p); };
  ro.skip = in_cusp;
  ro.on_split = [&](int a, int b, int m) {
    const auto it = segs.find(key(a, b));
    if (it == segs.end()) return;
    const Seg s = it->second;
    segs.erase(it);
    const int first = s.a;
    const int second = s.b;
    segs[key(first, m)] = {first, m, s.marker, s.slit};
    segs[key(m, second)] = {m, second, s.marker, s.slit};
  };
  cdt.refine(ro);
  if (!geometry.cusps.empty()) {
    // Inside cusp neighbourhoods only the size target applies; the thin
    // geometry bounds the attainable angles.
    ro.min_angle_deg = 0.0;
    ro.skip = nullptr;
    cdt.refine(ro);
  }

  // Compact vertex ids.
  const auto tris = cdt.inside_triangles();
  const auto& cpts = cdt.points();
  std::vector<int> remap(cpts.size(), -1);
  TriMesh mesh;
  mesh.h = h;
  mesh.grading = opts.grading;
  for (const auto& t : tris) {
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k) {
      int& r = remap[t[k]];
      if (r < 0) {
        r = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(cpts[t[k] + 3]);
      }
      out[k] = r;
    }
    mesh.triangles.push_back(out);
  }
  mesh.origin.resize(mesh.vertices.size());
  std::iota(mesh.origin.begin(), mesh.origin.end(), 0);

  // Split slit vertices: around each vertex, triangles connected through non-slit
  // edges form one side; every side beyond the first gets its own copy.
  std::map<std::pair<int, int>, Seg> msegs;
  for (const auto& [k, s] : segs) {
    const int a = remap[s.a];
    const int b = remap[s.b];
    if (a < 0 || b < 0) continue;
    msegs[key(a, b)] = {a, b, s.marker, s.slit};
  }
  std::vector<std::vector<int>> vt(mesh.vertices.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int v : mesh.triangles[t]) vt[v].push_back(static_cast<int>(t));
  }
  auto is_slit = [&](int a, int b) {
    const auto it = msegs.find(key(a, b));
    return it != msegs.end() && it->second.slit;
  };
  std::vector<char> on_slit(mesh.vertices.size(), 0);
  for (const auto& [k, s] : msegs) {
    if (s.slit) on_slit[s.a] = on_slit[s.b] = 1;
  }
  const std::size_t original_count = mesh.vertices.size();
  for (std::size_t v = 0; v < original_count; ++v) {
    if (!on_slit[v]) continue;
    const auto& fan = vt[v];
    std::vector<int> comp(fan.size(), -1);
    int ncomp = 0;
    for (std::size_t i = 0; i < fan.size(); ++i) {
      if (comp[i] >= 0) continue;
      comp[i] = ncomp;
      std::vector<std::size_t> stack{i};
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (std::size_t y = 0; y < fan.size(); ++y) {
          if (comp[y] >= 0) continue;
          // Shared edge through v?
          const auto& tx = mesh.triangles[fan[x]];
          const auto& ty = mesh.triangles[fan[y]];
          for (int u : tx) {
            if (u == static_cast<int>(v)) continue;
            if (std::find(ty.begin(), ty.end(), u) != ty.end() && !is_slit(static_cast<int>(v), u)) {
              comp[y] = ncomp;
              stack.push_back(y);
              break;
            }
          }
        }
      }
      ++ncomp;
    }
    for (int c = 1; c < ncomp; ++c) {
      const int copy = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(mesh.vertices[v]);
      mesh.origin.push_back(static_cast<int>(v));
      for (std::size_t i = 0; i < fan.size(); ++i) {
        if (comp[i] != c) continue;
        for (int& u : mesh.triangles[fan[i]]) {
          if (u == static_cast<int>(v)) u = copy;
        }
      }
    }
  }

  // Boundary edges with markers, oriented with the mesh on the left.
  std::map<std::pair<int, int>, int> edge_tri;  // directed edge -> triangle
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) edge_tri[{tr[k], tr[(k + 1) % 3]}] = static_cast<int>(t);
  }
  for (const auto& [e, t] : edge_tri) {
    if (edge_tri.count({e.second, e.first})) continue;
    const int oa = mesh.origin[e.first];
    const int ob = mesh.origin[e.second];
    const auto it = msegs.find(key(oa, ob));
    BoundaryMarker m = BoundaryMarker::Boundary;
    if (it != msegs.end()) {
      m = it->second.marker;
      if (it->second.slit) {
        // Slits run from the outer boundary to the tip; the left side sees the edge forward.
        m = (it->second.a == oa) ? BoundaryMarker::CrackLeft : BoundaryMarker::CrackRight;
      }
    }
    mesh.boundary_edges.push_back({e.first, e.second, m});
  }

  // Quality away from cusps.
  const double floor = opts.min_angle_deg * kPi / 180.0;
  for (const auto& t : mesh.triangles) {
    const Vec2& a = mesh.vertices[t[0]];
    const Vec2& b = mesh.vertices[t[1]];
    const Vec2& c = mesh.vertices[t[2]];
    if (cross(b - a, c - a) <= 0.0) throw Error(ErrorCode::MeshQualityFailure, "inverted triangle");
    if (in_cusp((a + b + c) / 3.0)) continue;
    if (detail::Cdt::min_angle(a, b, c) < floor) {
      throw Error(ErrorCode::MeshQualityFailure,
                  "triangle with angle " + std::to_string(detail::Cdt::min_angle(a, b, c) * 180.0 / kPi) +
                      " deg near (" + std::to_string(a.x()) + ", " + std::to_string(a.y()) + ")");
    }
  }
  return mesh;
}

TriMesh mesh_domain(const NeumannComplex& complex, int domain, const MeshOptions& opts) {
  const double h_min = opts.h * opts.h_min_ratio;
  TriMesh mesh;
  if (opts.truncate) {
    const TruncatedDomain td = truncate_domain(complex, domain, *opts.truncate, h_min);
    mesh = mesh_geometry(td.geometry, opts);
  } else {
    mesh = mesh_geometry(domain_geometry(complex, domain, h_min), opts);
  }
  mesh.t = opts.truncate;
  return mesh;
}

TriMesh mesh_polygon(const Polyline& polygon, const MeshOptions& opts) {
  DomainGeometry g;
  g.outer = polygon;
  g.markers.assign(polygon.size(), BoundaryMarker::Boundary);
  g.corners.resize(polygon.size());
  std::iota(g.corners.begin(), g.corners.end(), 0);
  g.corner_critical.assign(polygon.size(), -1);
  if (signed_area(polygon) <= 0.0) throw Error(ErrorCode::InvalidArgument, "polygon must be counter-clockwise");
  return mesh_geometry(g, opts);
}

}  // namespace neumann
