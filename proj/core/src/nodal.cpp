#include "neumann/nodal.hpp"

#include "neumann/error.hpp"
#include "segment_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

namespace neumann {

namespace {

// Lattice offsets in cell units; irrational so that zero sets of low-order
// trigonometric fields do not pass through lattice nodes.
constexpr double kOffsetX = 0.3819660112501051;
constexpr double kOffsetY = 0.2360679774997897;

struct Lattice {
  int n;
  double h;
  std::vector<double> values;

  Vec2 node(int i, int j) const { return {(i + kOffsetX) * h, (j + kOffsetY) * h}; }
  int wrap(int i) const { return ((i % n) + n) % n; }
  double at(int i, int j) const { return values[wrap(j) * n + wrap(i)]; }
};

// Edge ids: horizontal edge from node (i,j) to (i+1,j) is 2*(j*n+i), vertical edge
// from (i,j) to (i,j+1) is 2*(j*n+i)+1.
int h_edge(const Lattice& g, int i, int j) { return 2 * (g.wrap(j) * g.n + g.wrap(i)); }
int v_edge(const Lattice& g, int i, int j) { return 2 * (g.wrap(j) * g.n + g.wrap(i)) + 1; }

Vec2 edge_root(const MorseField& f, const Lattice& g, int edge) {
  const int cell = edge / 2;
  const int i = cell % g.n;
  const int j = cell / g.n;
  const Vec2 a = g.node(i, j);
  const Vec2 b = (edge % 2 == 0) ? g.node(i + 1, j) : g.node(i, j + 1);
  double fa = g.at(i, j);
  double fb = (edge % 2 == 0) ? g.at(i + 1, j) : g.at(i, j + 1);
  // Linear interpolation, refined by a few Illinois steps on the field itself.
  double lo = 0.0, hi = 1.0;
  double t = fa / (fa - fb);
  int side = 0;
  for (int it = 0; it < 4; ++it) {
    const double ft = f.value(a + t * (b - a));
    if (ft == 0.0) break;
    if ((ft > 0.0) == (fa > 0.0)) {
      lo = t;
      fa = ft;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      hi = t;
      fb = ft;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    t = std::clamp(lo + (hi - lo) * fa / (fa - fb), lo, hi);
  }
  return a + t * (b - a);
}

struct Segment {
  int a;
  int b;
};

struct End {
  int chain;
  bool back;
  friend bool operator<(const End& x, const End& y) { return std::tie(x.chain, x.back) < std::tie(y.chain, y.back); }
};

// Saddles on the zero set, where two nodal curves cross.
std::vector<Vec2> nodal_saddles(const MorseField& field) {
  CriticalOptions o;
  o.check_refinement = false;
  double amplitude = 0.0;
  for (const auto& m : field.modes()) amplitude += std::abs(m.amplitude);
  std::vector<Vec2> out;
  for (const auto& c : find_critical_points(field, o)) {
    if (c.kind == CriticalKind::Saddle && std::abs(c.value) < 1e-8 * std::max(amplitude, 1.0)) out.push_back(c.position);
  }
  return out;
}

}  // namespace

std::vector<NodalLine> nodal_set(const MorseField& field, int grid_res) {
  if (grid_res < 4) throw Error(ErrorCode::InvalidArgument, "nodal grid resolution below 4");
  Lattice g{grid_res, kTwoPi / grid_res, {}};
  g.values.resize(static_cast<std::size_t>(grid_res) * grid_res);
  for (int j = 0; j < grid_res; ++j) {
    for (int i = 0; i < grid_res; ++i) g.values[j * grid_res + i] = field.value(g.node(i, j));
  }
  auto pos = [](double v) { return v >= 0.0; };

  // Marching squares cannot resolve a crossing, so cells next to a nodal saddle
  // are left out and the curve ends around it are joined afterwards.
  const std::vector<Vec2> saddles = nodal_saddles(field);
  const double hole = 1.5 * g.h;

  std::vector<Segment> segs;
  for (int j = 0; j < grid_res; ++j) {
    for (int i = 0; i < grid_res; ++i) {
      const Vec2 centre = g.node(i, j) + Vec2::Constant(0.5 * g.h);
      if (std::any_of(saddles.begin(), saddles.end(), [&](const Vec2& s) { return torus_distance(s, centre) < hole; })) {
        continue;
      }
      const double c[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
      // Edges in counter-clockwise order: bottom, right, top, left.
      const int e[4] = {h_edge(g, i, j), v_edge(g, i + 1, j), h_edge(g, i, j + 1), v_edge(g, i, j)};
      std::vector<int> cut;
      for (int k = 0; k < 4; ++k) {
        if (pos(c[k]) != pos(c[(k + 1) % 4])) cut.push_back(k);
      }
      if (cut.size() == 2) {
        segs.push_back({e[cut[0]], e[cut[1]]});
      } else if (cut.size() == 4) {
        if (pos(field.value(centre)) == pos(c[0])) {
          segs.push_back({e[0], e[1]});
          segs.push_back({e[2], e[3]});
        } else {
          segs.push_back({e[3], e[0]});
          segs.push_back({e[1], e[2]});
        }
      }
    }
  }

  const std::size_t nedges = 2 * static_cast<std::size_t>(grid_res) * grid_res;
  std::vector<std::vector<int>> at_edge(nedges);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    at_edge[segs[s].a].push_back(static_cast<int>(s));
    at_edge[segs[s].b].push_back(static_cast<int>(s));
  }
  std::vector<std::optional<Vec2>> roots(nedges);
  auto root = [&](int edge) -> const Vec2& {
    if (!roots[edge]) roots[edge] = edge_root(field, g, edge);
    return *roots[edge];
  };

  // Chains of segments; open ones first, started from their free ends.
  std::vector<char> used(segs.size(), 0);
  auto trace = [&](int s0, int start_edge, bool& closed) {
    Polyline pts{root(start_edge)};
    int edge = start_edge;
    int seg = s0;
    closed = true;
    while (true) {
      used[seg] = 1;
      const int next = (segs[seg].a == edge) ? segs[seg].b : segs[seg].a;
      pts.push_back(nearest_lift(root(next), pts.back()));
      edge = next;
      if (edge == start_edge) break;
      int follow = -1;
      for (int cand : at_edge[edge]) {
        if (cand != seg && !used[cand]) follow = cand;
      }
      if (follow < 0) {
        closed = false;
        break;
      }
      seg = follow;
    }
    return pts;
  };

  std::vector<NodalLine> out;
  std::vector<Polyline> open;
  for (std::size_t e = 0; e < nedges; ++e) {
    if (at_edge[e].size() != 1 || used[at_edge[e][0]]) continue;
    bool closed = false;
    open.push_back(trace(at_edge[e][0], static_cast<int>(e), closed));
  }
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    NodalLine line;
    line.points = trace(static_cast<int>(s0), segs[s0].a, line.closed);
    out.push_back(std::move(line));
  }

  // Pair the curve ends around each nodal saddle by opposite directions.
  std::map<End, std::pair<End, Vec2>> link;
  for (const Vec2& s : saddles) {
    std::vector<std::pair<double, End>> ends;
    for (std::size_t c = 0; c < open.size(); ++c) {
      for (bool back : {false, true}) {
        const Vec2 d = torus_delta(s, back ? open[c].back() : open[c].front());
        if (d.norm() < 3.0 * g.h) ends.push_back({std::atan2(d.y(), d.x()), {static_cast<int>(c), back}});
      }
    }
    if (ends.size() % 2 != 0) continue;
    std::sort(ends.begin(), ends.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    const std::size_t half = ends.size() / 2;
    for (std::size_t k = 0; k < half; ++k) {
      link[ends[k].second] = {ends[k + half].second, s};
      link[ends[k + half].second] = {ends[k].second, s};
    }
  }

  std::vector<char> done(open.size(), 0);
  for (std::size_t c0 = 0; c0 < open.size(); ++c0) {
    if (done[c0]) continue;
    // Walk backwards to a free end first, so open curves come out whole.
    End start{static_cast<int>(c0), false};
    for (std::size_t guard = 0; guard <= open.size(); ++guard) {
      const auto it = link.find(start);
      if (it == link.end()) break;
      const End prev{it->second.first.chain, !it->second.first.back};
      if (prev.chain == static_cast<int>(c0) && !prev.back) break;
      start = prev;
      if (start.chain == static_cast<int>(c0)) break;
    }
    NodalLine line;
    End at = start;
    while (true) {
      done[at.chain] = 1;
      const Polyline& chain = open[at.chain];
      const Vec2 shift = line.points.empty() ? Vec2::Zero()
                                             : Vec2(nearest_lift(at.back ? chain.back() : chain.front(), line.points.back()) -
                                                    (at.back ? chain.back() : chain.front()));
      if (at.back) {
        for (auto p = chain.rbegin(); p != chain.rend(); ++p) line.points.push_back(*p + shift);
      } else {
        for (const auto& p : chain) line.points.push_back(p + shift);
      }
      const End exit{at.chain, !at.back};
      const auto it = link.find(exit);
      if (it == link.end()) {
        line.closed = false;
        break;
      }
      line.points.push_back(nearest_lift(it->second.second, line.points.back()));
      at = it->second.first;
      if (at.chain == start.chain && at.back == start.back) {
        line.points.push_back(nearest_lift(at.back ? open[at.chain].back() : open[at.chain].front(), line.points.back()));
        break;
      }
      if (done[at.chain]) {
        line.closed = false;
        break;
      }
    }
    out.push_back(std::move(line));
  }
  for (auto& l : out) {
    if (!l.closed) continue;
    const Vec2 d = l.points.back() - l.points.front();
    l.period = Vec2(kTwoPi * std::round(d.x() / kTwoPi), kTwoPi * std::round(d.y() / kTwoPi));
  }

  // Deterministic order: by lowest wrapped starting point of each component.
  for (auto& l : out) {
    if (!l.closed) continue;
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < l.points.size(); ++k) {
      const Vec2 p = wrap_point(l.points[k]);
      const Vec2 q = wrap_point(l.points[best]);
      if (p.x() < q.x() || (p.x() == q.x() && p.y() < q.y())) best = k;
    }
    Polyline rot;
    const std::size_t m = l.points.size() - 1;
    for (std::size_t k = 0; k <= m; ++k) {
      const std::size_t idx = (best + k) % m;
      const Vec2 p = l.points[idx] + (best + k >= m ? l.period : Vec2::Zero());
      rot.push_back(p);
    }
    const Vec2 shift = wrap_point(rot.front()) - rot.front();
    for (auto& p : rot) p += shift;
    l.points = std::move(rot);
  }
  std::sort(out.begin(), out.end(), [](const NodalLine& a, const NodalLine& b) {
    const Vec2& p = a.points.front();
    const Vec2& q = b.points.front();
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  return out;
}

namespace {

Vec2 chord(const Polyline& pts, std::size_t i, std::size_t span) {
  const std::size_t lo = i >= span ? i - span : 0;
  const std::size_t hi = std::min(i + 1 + span, pts.size() - 1);
  return pts[hi] - pts[lo];
}

// Tangent at parameter `at` (arclength from pts[i]) of the quadratic through three
// consecutive points around segment i, parametrised by chord length.
Vec2 quadratic_tangent(const Polyline& pts, std::size_t i, double at) {
  if (pts.size() < 3) return pts.back() - pts.front();
  std::size_t k = i == 0 ? 0 : i - 1;
  if (k + 2 >= pts.size()) k = pts.size() - 3;
  const Vec2& p0 = pts[k];
  const Vec2& p1 = pts[k + 1];
  const Vec2& p2 = pts[k + 2];
  const double t0 = 0.0;
  const double t1 = (p1 - p0).norm();
  const double t2 = t1 + (p2 - p1).norm();
  if (t1 <= 0.0 || t2 <= t1) return pts[i + 1] - pts[i];
  const double t = (i == k ? 0.0 : t1) + at;
  // Derivative of the Lagrange interpolant.
  const Vec2 d = p0 * ((2 * t - t1 - t2) / ((t0 - t1) * (t0 - t2))) +
                 p1 * ((2 * t - t0 - t2) / ((t1 - t0) * (t1 - t2))) +
                 p2 * ((2 * t - t0 - t1) / ((t2 - t0) * (t2 - t1)));
  return d;
}

double acute(const Vec2& a, const Vec2& b) {
  const double t = angle_between(a, b);
  return std::min(t, kPi - t);
}

}  // namespace

std::vector<NodalCrossing> nodal_neumann_angles(const NeumannComplex& complex,
                                                const std::vector<NodalLine>& nodal, int grid_res) {
  const double cell = kTwoPi / grid_res;
  const double arm_radius = 4.0 * cell;
  const double exclusion = 6.0 * cell;
  double amplitude = 0.0;
  for (const auto& m : complex.field.modes()) amplitude += std::abs(m.amplitude);

  std::vector<int> zero_saddles;
  for (std::size_t c = 0; c < complex.criticals.size(); ++c) {
    const auto& cp = complex.criticals[c];
    if (cp.kind == CriticalKind::Saddle && std::abs(cp.value) < 1e-8 * std::max(amplitude, 1.0)) {
      zero_saddles.push_back(static_cast<int>(c));
    }
  }

  std::vector<NodalCrossing> out;
  // Crossings at saddles on the zero set: compare each Neumann line with the nearest
  // nodal arm, both sampled where they leave a small circle around the saddle.
  for (int s : zero_saddles) {
    const Vec2 centre = complex.criticals[s].position;
    std::vector<std::pair<Vec2, int>> arms;
    for (std::size_t k = 0; k < nodal.size(); ++k) {
      const auto& pts = nodal[k].points;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 a = torus_delta(centre, pts[i - 1]);
        const Vec2 b = a + (pts[i] - pts[i - 1]);
        if ((a.norm() < arm_radius) != (b.norm() < arm_radius) && a.norm() < 2.0 * arm_radius) {
          arms.emplace_back(a.norm() < arm_radius ? b : a, static_cast<int>(k));
        }
      }
    }
    if (arms.empty()) continue;
    for (const auto& e : complex.incidence[s]) {
      const Polyline local = local_polyline(complex, e.line, e.at_start, true);
      Vec2 dir = local.back();
      for (const auto& p : local) {
        if (p.norm() >= arm_radius) {
          dir = p;
          break;
        }
      }
      double best = std::numeric_limits<double>::infinity();
      int which = -1;
      for (const auto& [arm, k] : arms) {
        const double t = angle_between(dir, arm);
        if (t < best) {
          best = t;
          which = k;
        }
      }
      out.push_back({centre, best, e.line, which, s});
    }
  }

  detail::TorusSegmentGrid grid(std::max(16, grid_res / 2));
  for (std::size_t k = 0; k < nodal.size(); ++k) {
    const auto& pts = nodal[k].points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      grid.insert(pts[i - 1], pts[i], static_cast<int>(k), static_cast<int>(i - 1));
    }
  }
  for (std::size_t l = 0; l < complex.lines.size(); ++l) {
    const auto& s = complex.lines[l].samples();
    std::vector<NodalCrossing> found;
    for (std::size_t i = 1; i < s.size(); ++i) {
      grid.query(s[i - 1], s[i], 0.0, [&](const auto& seg, const Vec2& a, const Vec2& b) {
        const auto hit = detail::segment_intersection(s[i - 1], s[i], a, b);
        if (!hit) return;
        for (int z : zero_saddles) {
          if (torus_distance(*hit, complex.criticals[z].position) < exclusion) return;
        }
        for (const auto& f : found) {
          if (f.nodal == seg.owner && torus_distance(f.point, *hit) < 1e-6) return;
        }
        const auto& np = nodal[seg.owner].points;
        const auto si = static_cast<std::size_t>(seg.index);
        const Vec2 tn = quadratic_tangent(np, si, (*hit - a).norm());
        const Vec2 tl = chord(s, i - 1, 2);
        found.push_back({wrap_point(*hit), acute(tn, tl), static_cast<int>(l), seg.owner, -1});
      });
    }
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

}  // namespace neumann
