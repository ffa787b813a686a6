#include "neumann/complex.hpp"

#include "neumann/error.hpp"
#include "segment_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace neumann {

const char* to_string(DomainClass c) {
  switch (c) {
    case DomainClass::Regular: return "regular";
    case DomainClass::Cracked: return "cracked";
    case DomainClass::DoublyCracked: return "doublyCracked";
  }
  return "unknown";
}

int origin_of(const NeumannComplex& complex, HalfEdgeRef he) {
  const auto& l = complex.lines.at(he.line);
  return he.forward ? l.start() : l.end();
}

Polyline local_polyline(const NeumannComplex& complex, int line, bool at_start, bool use_raw) {
  const auto& path = complex.lines.at(line).path;
  const Polyline& pts = use_raw ? path.raw : path.samples;
  Polyline out;
  out.reserve(pts.size());
  if (at_start) {
    const Vec2 o = pts.front();
    for (const auto& p : pts) out.push_back(p - o);
  } else {
    const Vec2 o = pts.back();
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) out.push_back(*it - o);
  }
  return out;
}

Polyline half_edge_samples(const NeumannComplex& complex, HalfEdgeRef he) {
  const auto& s = complex.lines.at(he.line).path.samples;
  if (he.forward) return s;
  return Polyline(s.rbegin(), s.rend());
}

int degree(const NeumannComplex& complex, int critical) {
  if (critical < 0 || critical >= static_cast<int>(complex.criticals.size())) {
    throw Error(ErrorCode::UnknownCriticalPoint, "critical point index out of range");
  }
  return static_cast<int>(complex.incidence[critical].size());
}

bool is_morse_smale(const NeumannComplex& complex) {
  for (const auto& l : complex.lines) {
    if (l.start() < 0 || l.end() < 0) continue;
    if (complex.criticals[l.start()].kind == CriticalKind::Saddle &&
        complex.criticals[l.end()].kind == CriticalKind::Saddle) {
      return false;
    }
  }
  return true;
}

DomainClass classify_domain(const NeumannComplex& complex, const NeumannDomain& domain) {
  const bool max_crack = degree(complex, domain.max_point) == 1;
  const bool min_crack = degree(complex, domain.min_point) == 1;
  if (max_crack && min_crack) return DomainClass::DoublyCracked;
  if (max_crack || min_crack) return DomainClass::Cracked;
  return DomainClass::Regular;
}

namespace {

Vec2 first_beyond(const Polyline& local, double r) {
  for (const auto& p : local) {
    if (p.norm() >= r) return p;
  }
  return local.back();
}

double nearest_critical(const std::vector<CriticalPoint>& cps, int v) {
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cps.size(); ++j) {
    if (static_cast<int>(j) == v) continue;
    nearest = std::min(nearest, torus_distance(cps[v].position, cps[j].position));
  }
  return nearest;
}

double order_radius(const std::vector<CriticalPoint>& cps, int v) {
  return std::min(0.05, 0.25 * nearest_critical(cps, v));
}

// Side of polyline b relative to polyline a, both leaving the origin: +1 if b lies to the
// left of a (counterclockwise at the origin), -1 if to the right, 0 if never separated.
int side_of(const Polyline& a, const Polyline& b) {
  constexpr double apart = 1e-5;
  std::size_t j = 1;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const Vec2& p = a[i];
    if (p.norm() < apart * 10.0) continue;
    while (j + 1 < b.size() && (b[j + 1] - p).squaredNorm() <= (b[j] - p).squaredNorm()) ++j;
    const std::size_t lo = j > 0 ? j - 1 : 0;
    const std::size_t hi = std::min(j + 1, b.size() - 1);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k < hi; ++k) d = std::min(d, point_segment_distance(p, b[k], b[k + 1]));
    if (d < apart) continue;
    const Vec2 t = a[i] - a[i - 1];
    const double c = cross(t, b[j] - p);
    return c > 0.0 ? 1 : -1;
  }
  return 0;
}

// Lines entering an extremum along a shared slow direction can agree to many digits at
// the ordering radius. Runs of such ends are ordered by which side of each other they
// lie on where the pair first separates; true gradient lines never swap sides.
void resolve_ties(const NeumannComplex& cx, std::vector<IncidentEnd>& ends) {
  constexpr double tie = 5e-3;
  const std::size_t n = ends.size();
  if (n < 2) return;
  auto gap = [&](std::size_t k) {
    double g = ends[(k + 1) % n].order_angle - ends[k].order_angle;
    if (k + 1 == n) g += kTwoPi;
    return g;
  };
  std::size_t start = 0;
  while (start < n && gap((start + n - 1) % n) < tie) ++start;
  if (start == n) return;
  std::rotate(ends.begin(), ends.begin() + static_cast<std::ptrdiff_t>(start), ends.end());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && gap(j - 1) < tie) ++j;
    if (j - i > 1) {
      std::vector<Polyline> paths;
      for (std::size_t k = i; k < j; ++k) {
        paths.push_back(local_polyline(cx, ends[k].line, ends[k].at_start, true));
      }
      std::vector<std::size_t> idx(j - i);
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      // Insertion sort; the side relation is only a strict order within a tied run.
      for (std::size_t k = 1; k < idx.size(); ++k) {
        for (std::size_t m = k; m > 0 && side_of(paths[idx[m]], paths[idx[m - 1]]) > 0; --m) {
          std::swap(idx[m], idx[m - 1]);
        }
      }
      std::vector<IncidentEnd> run;
      for (std::size_t k : idx) run.push_back(ends[i + k]);
      std::copy(run.begin(), run.end(), ends.begin() + static_cast<std::ptrdiff_t>(i));
    }
    i = j;
  }
  std::rotate(ends.begin(), ends.begin() + static_cast<std::ptrdiff_t>(n - start), ends.end());
}

void build_incidence(NeumannComplex& cx, const ComplexOptions& opts) {
  cx.incidence.assign(cx.criticals.size(), {});
  for (std::size_t l = 0; l < cx.lines.size(); ++l) {
    const auto& line = cx.lines[l];
    if (line.start() < 0 || line.end() < 0) {
      throw Error(ErrorCode::AssertionFailed, "line without terminal critical points");
    }
    for (bool at_start : {true, false}) {
      const int v = at_start ? line.start() : line.end();
      const Polyline local = local_polyline(cx, static_cast<int>(l), at_start, true);
      const Vec2 ord = first_beyond(local, order_radius(cx.criticals, v));
      const Vec2 tan = first_beyond(local, opts.flow.capture_radius);
      cx.incidence[v].push_back({static_cast<int>(l), at_start, std::atan2(ord.y(), ord.x()),
                                 std::atan2(tan.y(), tan.x())});
    }
  }
  for (std::size_t v = 0; v < cx.criticals.size(); ++v) {
    auto& ends = cx.incidence[v];
    std::sort(ends.begin(), ends.end(), [](const IncidentEnd& a, const IncidentEnd& b) {
      if (a.order_angle != b.order_angle) return a.order_angle < b.order_angle;
      if (a.line != b.line) return a.line < b.line;
      return a.at_start > b.at_start;
    });
    resolve_ties(cx, ends);
    cx.criticals[v].degree = static_cast<int>(ends.size());
  }
}

// Cyclic successor/predecessor bookkeeping for the rotation system.
struct Rotation {
  std::vector<int> vertex_of;  // half-edge -> vertex it leaves
  std::vector<int> slot_of;    // half-edge -> index within incidence[vertex]
};

Rotation make_rotation(const NeumannComplex& cx) {
  Rotation r;
  r.vertex_of.assign(2 * cx.lines.size(), -1);
  r.slot_of.assign(2 * cx.lines.size(), -1);
  for (std::size_t v = 0; v < cx.incidence.size(); ++v) {
    for (std::size_t k = 0; k < cx.incidence[v].size(); ++k) {
      const auto& e = cx.incidence[v][k];
      const int he = 2 * e.line + (e.at_start ? 0 : 1);
      r.vertex_of[he] = static_cast<int>(v);
      r.slot_of[he] = static_cast<int>(k);
    }
  }
  return r;
}

HalfEdgeRef from_id(int he) { return {he / 2, he % 2 == 0}; }

void outline_face(const NeumannComplex& cx, NeumannDomain& d) {
  d.outline.clear();
  const int v0 = origin_of(cx, d.boundary.front());
  const Vec2 start = cx.criticals[v0].position;
  Vec2 lift = start;
  for (const auto& he : d.boundary) {
    const Polyline pts = half_edge_samples(cx, he);
    const Vec2 shift = lift - pts.front();
    for (std::size_t i = d.outline.empty() ? 0 : 1; i < pts.size(); ++i) d.outline.push_back(pts[i] + shift);
    lift = pts.back() + shift;
  }
  if ((lift - start).norm() > 1e-6) {
    std::ostringstream msg;
    msg << "face boundary does not close in the universal cover (offset " << (lift - start).x()
        << ", " << (lift - start).y() << ")";
    throw Error(ErrorCode::AssertionFailed, msg.str());
  }
  if (d.outline.size() > 1 && (d.outline.back() - d.outline.front()).norm() < 1e-12) d.outline.pop_back();
  d.area = signed_area(d.outline);
}

double min_distance_to_outline(const Polyline& outline, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = outline.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, outline[i], outline[(i + 1) % n]));
  }
  return best;
}

const IncidentEnd& end_of(const NeumannComplex& cx, int v, int line, bool at_start) {
  for (const auto& e : cx.incidence[v]) {
    if (e.line == line && e.at_start == at_start) return e;
  }
  throw Error(ErrorCode::AssertionFailed, "half-edge missing from rotation system");
}

Vec2 pick_interior_point(const NeumannComplex& cx, const NeumannDomain& d) {
  // Candidates sit on the bisector of each saddle corner, where the face opens at a right
  // angle; the one farthest from the outline wins. Thin faces are only wide near saddles.
  Vec2 best_p = Vec2::Zero();
  double best_d = 0.0;
  Vec2 lift = cx.criticals[origin_of(cx, d.boundary.front())].position;
  const std::size_t n = d.boundary.size();
  for (std::size_t i = 0; i < n; ++i) {
    const HalfEdgeRef out = d.boundary[i];
    const HalfEdgeRef in = d.boundary[(i + n - 1) % n];
    const int v = origin_of(cx, out);
    const Polyline pts = half_edge_samples(cx, out);
    if (cx.criticals[v].kind == CriticalKind::Saddle) {
      const double a0 = end_of(cx, v, out.line, out.forward).order_angle;
      double gap = end_of(cx, v, in.line, !in.forward).order_angle - a0;
      gap -= kTwoPi * std::floor(gap / kTwoPi);
      const double rho = order_radius(cx.criticals, v);
      for (double r : {0.5 * rho, 0.2 * rho}) {
        const double a = a0 + 0.5 * gap;
        const Vec2 p = lift + r * Vec2(std::cos(a), std::sin(a));
        if (winding_number(d.outline, p) == 0) continue;
        const double dist = min_distance_to_outline(d.outline, p);
        if (dist > best_d) {
          best_d = dist;
          best_p = p;
        }
      }
    }
    lift += pts.back() - pts.front();
  }
  if (best_d > 0.0) return best_p;
  throw Error(ErrorCode::AssertionFailed, "could not find an interior point of a face");
}

void fill_domains(NeumannComplex& cx) {
  const Rotation rot = make_rotation(cx);
  const std::size_t nhe = 2 * cx.lines.size();
  std::vector<char> visited(nhe, 0);
  for (std::size_t h0 = 0; h0 < nhe; ++h0) {
    if (visited[h0]) continue;
    NeumannDomain d;
    int cur = static_cast<int>(h0);
    std::size_t guard = 0;
    do {
      if (visited[cur] || ++guard > nhe) {
        throw Error(ErrorCode::AssertionFailed, "inconsistent rotation system during face walk");
      }
      visited[cur] = 1;
      d.boundary.push_back(from_id(cur));
      const int twin = cur ^ 1;
      const int v = rot.vertex_of[twin];
      const auto deg = static_cast<int>(cx.incidence[v].size());
      const auto& prev = cx.incidence[v][(rot.slot_of[twin] - 1 + deg) % deg];
      cur = 2 * prev.line + (prev.at_start ? 0 : 1);
    } while (cur != static_cast<int>(h0));

    std::set<int> maxima, minima;
    std::vector<int> saddles;
    for (const auto& he : d.boundary) {
      const int v = origin_of(cx, he);
      switch (cx.criticals[v].kind) {
        case CriticalKind::Maximum: maxima.insert(v); break;
        case CriticalKind::Minimum: minima.insert(v); break;
        case CriticalKind::Saddle:
          if (std::find(saddles.begin(), saddles.end(), v) == saddles.end()) saddles.push_back(v);
          break;
      }
    }
    if (maxima.size() != 1 || minima.size() != 1) {
      std::ostringstream msg;
      msg << "face with " << maxima.size() << " maxima and " << minima.size()
          << " minima on its boundary";
      throw Error(ErrorCode::AssertionFailed, msg.str());
    }
    d.max_point = *maxima.begin();
    d.min_point = *minima.begin();
    d.saddles = std::move(saddles);

    std::set<int> seen_lines;
    for (const auto& he : d.boundary) {
      if (!seen_lines.insert(he.line).second) d.crack_lines.push_back(he.line);
    }
    std::sort(d.crack_lines.begin(), d.crack_lines.end());

    outline_face(cx, d);
    if (d.area <= 0.0) {
      throw Error(ErrorCode::AssertionFailed, "face walk produced a clockwise boundary");
    }
    d.classification = classify_domain(cx, d);
    d.interior_point = pick_interior_point(cx, d);
    cx.domains.push_back(std::move(d));
  }
}

void detect_cusps(NeumannComplex& cx, const ComplexOptions& opts) {
  const double threshold = opts.cusp_angle_deg * kPi / 180.0;
  for (auto& d : cx.domains) {
    d.cusps.clear();
    const std::size_t n = d.boundary.size();
    for (std::size_t i = 0; i < n; ++i) {
      const HalfEdgeRef in = d.boundary[i];
      const HalfEdgeRef out = d.boundary[(i + 1) % n];
      const int v = origin_of(cx, out);
      const auto& cp = cx.criticals[v];
      if (!cp.is_extremum() || cp.hess_proportional) continue;
      if (in.line == out.line && in.forward != out.forward) continue;  // crack tip
      const auto angles = angles_at(cx, v);
      const auto& ends = cx.incidence[v];
      std::size_t slot = 0;
      for (std::size_t k = 0; k < ends.size(); ++k) {
        if (ends[k].line == out.line && ends[k].at_start == out.forward) slot = k;
      }
      const double angle = angles[slot];
      if (angle >= threshold) continue;
      Cusp c;
      c.critical = v;
      c.incoming = in;
      c.outgoing = out;
      c.meeting_angle = angle;
      c.exponent = cusp_exponent(cp);
      const CuspFit fit = fit_cusp_gap(cx, v, out.line, out.forward, in.line, !in.forward,
                                       opts.cusp_fit_inner, opts.cusp_fit_radius);
      c.fitted_exponent = fit.slope;
      c.r_squared = fit.r_squared;
      c.confirmed = fit.samples >= 5 && fit.r_squared > opts.cusp_min_r2;
      d.cusps.push_back(c);
    }
  }
}

// Two lines running into a common extremum along the same slow direction approach each
// other exponentially and can touch numerically. A nearly tangential touch between such
// lines is treated as coalescence rather than a crossing.
bool coalescing(const NeumannComplex& cx, int la, int lb, const Vec2& da, const Vec2& db) {
  const double sine = std::abs(cross(da, db)) / (da.norm() * db.norm());
  if (sine > 0.02) return false;
  const auto& a = cx.lines[la];
  const auto& b = cx.lines[lb];
  for (int va : {a.start(), a.end()}) {
    for (int vb : {b.start(), b.end()}) {
      if (va == vb && cx.criticals[va].is_extremum()) return true;
    }
  }
  return false;
}

void check_crossings(const NeumannComplex& cx, const FlowOptions& flow) {
  detail::TorusSegmentGrid grid(256);
  const double excl = 30.0 * flow.capture_radius;
  auto near_end = [&](const NeumannLine& l, const Vec2& p) {
    return (p - l.path.raw.front()).norm() < excl || (p - l.path.end_lift).norm() < excl;
  };
  for (std::size_t l = 0; l < cx.lines.size(); ++l) {
    const auto& s = cx.lines[l].samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (near_end(cx.lines[l], s[i - 1]) || near_end(cx.lines[l], s[i])) continue;
      grid.insert(s[i - 1], s[i], static_cast<int>(l), static_cast<int>(i - 1));
    }
  }
  for (const auto& seg : grid.segments()) {
    grid.query(seg.a, seg.b, 0.0, [&](const auto& other, const Vec2& a, const Vec2& b) {
      if (other.owner <= seg.owner) return;
      if (auto hit = detail::segment_intersection(seg.a, seg.b, a, b)) {
        if (coalescing(cx, seg.owner, other.owner, seg.b - seg.a, b - a)) return;
        std::ostringstream msg;
        msg << "lines " << seg.owner << " and " << other.owner << " intersect near ("
            << wrap_coord(hit->x()) << ", " << wrap_coord(hit->y()) << ")";
        throw Error(ErrorCode::LineCrossing, msg.str());
      }
    });
  }
}

void verify_faces(const NeumannComplex& cx, const ComplexOptions& opts) {
  StopRule stop{cx.criticals, -1, opts.flow};
  for (std::size_t fi = 0; fi < cx.domains.size(); ++fi) {
    const auto& d = cx.domains[fi];
    std::vector<Vec2> samples{d.interior_point};
    std::mt19937_64 rng(opts.seed + fi);
    Vec2 lo = d.outline.front(), hi = d.outline.front();
    for (const auto& p : d.outline) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
    for (int attempt = 0; attempt < 20000 && static_cast<int>(samples.size()) <= opts.face_samples; ++attempt) {
      const Vec2 p(ux(rng), uy(rng));
      if (winding_number(d.outline, p) == 0) continue;
      if (min_distance_to_outline(d.outline, p) < 1e-3) continue;
      samples.push_back(p);
    }
    for (const auto& p : samples) {
      const FlowLine down = integrate_flow(cx.field, p, FlowDirection::Forward, stop);
      const FlowLine up = integrate_flow(cx.field, p, FlowDirection::Backward, stop);
      if (down.end_critical != d.min_point || up.end_critical != d.max_point) {
        std::ostringstream msg;
        msg << "face " << fi << ": sample (" << p.x() << ", " << p.y() << ") flows to "
            << up.end_critical << "/" << down.end_critical << " instead of " << d.max_point << "/"
            << d.min_point;
        throw Error(ErrorCode::AssertionFailed, msg.str());
      }
    }
  }
}

}  // namespace

NeumannComplex assemble_complex(const MorseField& field, std::vector<CriticalPoint> criticals,
                                std::vector<NeumannLine> lines, const ComplexOptions& opts) {
  NeumannComplex cx;
  cx.field = field;
  cx.criticals = std::move(criticals);
  cx.lines = std::move(lines);
  build_incidence(cx, opts);
  cx.morse_smale = is_morse_smale(cx);
  fill_domains(cx);
  detect_cusps(cx, opts);
  return cx;
}

NeumannComplex build_complex(const MorseField& field, const ComplexOptions& opts) {
  return build_complex(field, find_critical_points(field, opts.critical), opts);
}

NeumannComplex build_complex(const MorseField& field, std::vector<CriticalPoint> criticals,
                             const ComplexOptions& opts) {
  std::vector<NeumannLine> lines;
  for (std::size_t i = 0; i < criticals.size(); ++i) {
    if (criticals[i].kind != CriticalKind::Saddle) continue;
    auto four = trace_neumann_lines(field, criticals, static_cast<int>(i), opts.flow);
    for (auto& l : four) lines.push_back(std::move(l));
  }
  NeumannComplex cx;
  cx.field = field;
  cx.criticals = std::move(criticals);
  cx.lines = std::move(lines);
  if (opts.check_crossings) check_crossings(cx, opts.flow);
  build_incidence(cx, opts);
  cx.morse_smale = is_morse_smale(cx);
  fill_domains(cx);
  if (cx.euler_characteristic() != 0) {
    std::ostringstream msg;
    msg << "V - E + F = " << cx.criticals.size() << " - " << cx.lines.size() << " + "
        << cx.domains.size() << " != 0";
    throw Error(ErrorCode::EulerMismatch, msg.str());
  }
  if (cx.morse_smale) {
    for (const auto& d : cx.domains) {
      if (d.saddles.empty() || d.saddles.size() > 2) {
        throw Error(ErrorCode::AssertionFailed, "Morse-Smale face with other than one or two saddles");
      }
    }
  }
  detect_cusps(cx, opts);
  if (opts.verify_faces) verify_faces(cx, opts);
  return cx;
}

}  // namespace neumann
