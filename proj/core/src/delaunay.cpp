#include "delaunay.hpp"

#include "neumann/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace neumann::detail {

namespace {

long double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (static_cast<long double>(b.x()) - a.x()) * (static_cast<long double>(c.y()) - a.y()) -
         (static_cast<long double>(b.y()) - a.y()) * (static_cast<long double>(c.x()) - a.x());
}

// Positive when d lies inside the circumcircle of the counter-clockwise triangle abc.
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = a.x() - static_cast<long double>(d.x());
  const long double ady = a.y() - static_cast<long double>(d.y());
  const long double bdx = b.x() - static_cast<long double>(d.x());
  const long double bdy = b.y() - static_cast<long double>(d.y());
  const long double cdx = c.x() - static_cast<long double>(d.x());
  const long double cdy = c.y() - static_cast<long double>(d.y());
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcentre(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ba = b - a;
  const Vec2 ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double b2 = ba.squaredNorm();
  const double c2 = ca.squaredNorm();
  return a + Vec2(ca.y() * b2 - ba.y() * c2, ba.x() * c2 - ca.x() * b2) / d;
}

bool proper_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double o1 = orient(a, b, c);
  const long double o2 = orient(a, b, d);
  const long double o3 = orient(c, d, a);
  const long double o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

}  // namespace

double Cdt::min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double t0 = angle_between(b - a, c - a);
  const double t1 = angle_between(a - b, c - b);
  return std::min({t0, t1, kPi - t0 - t1});
}

Cdt::Cdt(const Vec2& lo, const Vec2& hi) {
  const Vec2 mid = 0.5 * (lo + hi);
  const double r = std::max((hi - lo).norm(), 1e-3) * 10.0;
  pts_ = {mid + Vec2(-r, -r), mid + Vec2(r, -r), mid + Vec2(0.0, r)};
  vtri_ = {0, 0, 0};
  new_triangle(0, 1, 2);
}

int Cdt::new_triangle(int a, int b, int c) {
  Triangle t;
  t.v = {a, b, c};
  const int id = static_cast<int>(tris_.size());
  tris_.push_back(t);
  vtri_[a] = vtri_[b] = vtri_[c] = id;
  return id;
}

int Cdt::edge_index(int t, int a, int b) const {
  const auto& v = tris_[t].v;
  for (int k = 0; k < 3; ++k) {
    const int p = v[(k + 1) % 3];
    const int q = v[(k + 2) % 3];
    if ((p == a && q == b) || (p == b && q == a)) return k;
  }
  return -1;
}

void Cdt::set_nbr(int t, int a, int b, int other) {
  if (t < 0) return;
  const int k = edge_index(t, a, b);
  if (k >= 0) tris_[t].nbr[k] = other;
}

int Cdt::locate(const Vec2& p, int start) const {
  int t = start;
  if (t < 0 || !tris_[t].alive) {
    t = -1;
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i) {
      if (tris_[i].alive) {
        t = i;
        break;
      }
    }
  }
  unsigned rot = 0;
  for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
    const auto& tr = tris_[t];
    bool moved = false;
    ++rot;
    for (int kk = 0; kk < 3; ++kk) {
      const int k = static_cast<int>((kk + rot) % 3);
      const Vec2& a = pts_[tr.v[(k + 1) % 3]];
      const Vec2& b = pts_[tr.v[(k + 2) % 3]];
      if (orient(a, b, p) < 0) {
        if (tr.nbr[k] < 0) return -1;
        t = tr.nbr[k];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  throw Error(ErrorCode::MeshQualityFailure, "point location did not terminate");
}

void Cdt::flip(int t, int k) {
  Triangle& T = tris_[t];
  const int n = T.nbr[k];
  const int p = T.v[k];
  const int a = T.v[(k + 1) % 3];
  const int b = T.v[(k + 2) % 3];
  Triangle& N = tris_[n];
  const int j = edge_index(n, a, b);
  const int d = N.v[j];
  const int x_bp = T.nbr[(k + 1) % 3];
  const bool f_bp = T.fixed[(k + 1) % 3];
  const int x_pa = T.nbr[(k + 2) % 3];
  const bool f_pa = T.fixed[(k + 2) % 3];
  // N = (d, b, a) up to rotation.
  const int x_ad = N.nbr[(j + 1) % 3];
  const bool f_ad = N.fixed[(j + 1) % 3];
  const int x_db = N.nbr[(j + 2) % 3];
  const bool f_db = N.fixed[(j + 2) % 3];

  T.v = {p, a, d};
  T.nbr = {x_ad, n, x_pa};
  T.fixed = {f_ad, false, f_pa};
  N.v = {p, d, b};
  N.nbr = {x_db, x_bp, t};
  N.fixed = {f_db, f_bp, false};
  set_nbr(x_ad, a, d, t);
  set_nbr(x_bp, b, p, n);
  vtri_[p] = t;
  vtri_[a] = t;
  vtri_[d] = t;
  vtri_[b] = n;
}

void Cdt::legalize(int t0, int k0) {
  std::vector<std::pair<int, int>> stack{{t0, k0}};
  while (!stack.empty()) {
    const auto [t, k] = stack.back();
    stack.pop_back();
    const Triangle& T = tris_[t];
    const int n = T.nbr[k];
    if (n < 0 || T.fixed[k]) continue;
    const int j = edge_index(n, T.v[(k + 1) % 3], T.v[(k + 2) % 3]);
    const int d = tris_[n].v[j];
    if (incircle(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], pts_[d]) <= 0) continue;
    flip(t, k);
    stack.emplace_back(t, 0);
    stack.emplace_back(n, 0);
  }
}

int Cdt::split_triangle(int t, const Vec2& p) {
  const int id = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vtri_.push_back(t);
  const Triangle old = tris_[t];
  const int a = old.v[0], b = old.v[1], c = old.v[2];
  const int t2 = new_triangle(b, c, id);
  const int t3 = new_triangle(c, a, id);
  Triangle& T = tris_[t];
  T.v = {a, b, id};
  T.nbr = {t2, t3, old.nbr[2]};
  T.fixed = {false, false, old.fixed[2]};
  tris_[t2].nbr = {t3, t, old.nbr[0]};
  tris_[t2].fixed = {false, false, old.fixed[0]};
  tris_[t3].nbr = {t, t2, old.nbr[1]};
  tris_[t3].fixed = {false, false, old.fixed[1]};
  tris_[t2].outside = tris_[t3].outside = old.outside;
  set_nbr(old.nbr[0], b, c, t2);
  set_nbr(old.nbr[1], c, a, t3);
  vtri_[a] = t;
  vtri_[b] = t;
  vtri_[c] = t2;
  vtri_[id] = t;
  legalize(t, 2);
  legalize(t2, 2);
  legalize(t3, 2);
  return id;
}

int Cdt::split_edge(int t, int k, const Vec2& p) {
  const int id = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vtri_.push_back(t);
  const Triangle oldt = tris_[t];
  const int c = oldt.v[k];
  const int a = oldt.v[(k + 1) % 3];
  const int b = oldt.v[(k + 2) % 3];
  const bool fx = oldt.fixed[k];
  const int n = oldt.nbr[k];
  const int x_bc = oldt.nbr[(k + 1) % 3];
  const bool f_bc = oldt.fixed[(k + 1) % 3];
  const int x_ca = oldt.nbr[(k + 2) % 3];
  const bool f_ca = oldt.fixed[(k + 2) % 3];

  const int t2 = new_triangle(c, id, b);
  tris_[t2].outside = oldt.outside;
  Triangle& T1 = tris_[t];
  T1.v = {c, a, id};
  T1.fixed = {fx, false, f_ca};
  tris_[t2].fixed = {fx, f_bc, false};
  set_nbr(x_bc, b, c, t2);
  vtri_[c] = t;
  vtri_[a] = t;
  vtri_[b] = t2;
  vtri_[id] = t;

  if (n >= 0) {
    const Triangle oldn = tris_[n];
    const int j = edge_index(n, a, b);
    const int d = oldn.v[j];
    // oldn = (d, b, a) up to rotation.
    const int x_ad = oldn.nbr[(j + 1) % 3];
    const bool f_ad = oldn.fixed[(j + 1) % 3];
    const int x_db = oldn.nbr[(j + 2) % 3];
    const bool f_db = oldn.fixed[(j + 2) % 3];
    const int n2 = new_triangle(d, id, a);
    tris_[n2].outside = oldn.outside;
    Triangle& N1 = tris_[n];
    N1.v = {d, b, id};
    N1.nbr = {t2, n2, x_db};
    N1.fixed = {fx, false, f_db};
    tris_[n2].nbr = {t, x_ad, n};
    tris_[n2].fixed = {fx, f_ad, false};
    set_nbr(x_ad, a, d, n2);
    tris_[t].nbr = {n2, t2, x_ca};
    tris_[t2].nbr = {n, x_bc, t};
    vtri_[d] = n;
    legalize(n, 2);
    legalize(n2, 1);
  } else {
    tris_[t].nbr = {-1, t2, x_ca};
    tris_[t2].nbr = {-1, x_bc, t};
  }
  legalize(t, 2);
  legalize(t2, 1);
  return id;
}

std::vector<int> Cdt::triangles_around(int v) const {
  std::vector<int> out;
  const int t0 = vtri_[v];
  int t = t0;
  // Counter-clockwise first; if the hull interrupts, continue clockwise from t0.
  do {
    out.push_back(t);
    const auto& T = tris_[t];
    int i = 0;
    while (T.v[i] != v) ++i;
    t = T.nbr[(i + 1) % 3];
  } while (t >= 0 && t != t0 && out.size() < tris_.size());
  if (t < 0) {
    t = t0;
    while (true) {
      const auto& T = tris_[t];
      int i = 0;
      while (T.v[i] != v) ++i;
      t = T.nbr[(i + 2) % 3];
      if (t < 0 || t == t0) break;
      out.push_back(t);
    }
  }
  return out;
}

bool Cdt::find_edge(int a, int b, int& t, int& k) const {
  for (int tt : triangles_around(a)) {
    const int kk = edge_index(tt, a, b);
    if (kk >= 0) {
      t = tt;
      k = kk;
      return true;
    }
  }
  return false;
}

int Cdt::insert(const Vec2& p, double merge) {
  const int t = locate(p, last_);
  if (t < 0) throw Error(ErrorCode::MeshQualityFailure, "point outside the triangulation");
  last_ = t;
  const auto& T = tris_[t];
  for (int k = 0; k < 3; ++k) {
    if ((pts_[T.v[k]] - p).norm() <= merge) return T.v[k] - 3;
  }
  // Snap to an edge when the point is numerically on it.
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = pts_[T.v[(k + 1) % 3]];
    const Vec2& b = pts_[T.v[(k + 2) % 3]];
    const double len = (b - a).norm();
    if (std::abs(static_cast<double>(orient(a, b, p))) <= 1e-12 * len * len) {
      return split_edge(t, k, p) - 3;
    }
  }
  return split_triangle(t, p) - 3;
}

bool Cdt::inside(const Vec2& p) const {
  const int t = locate(p, last_);
  return t >= 0 && !tris_[t].outside;
}

void Cdt::mark_fixed(int a, int b) {
  int t = -1, k = -1;
  if (!find_edge(a, b, t, k)) throw Error(ErrorCode::MeshQualityFailure, "constrained edge not recovered");
  tris_[t].fixed[k] = true;
  const int n = tris_[t].nbr[k];
  if (n >= 0) tris_[n].fixed[edge_index(n, a, b)] = true;
}

void Cdt::constrain(int ea, int eb) {
  const int a = ea + 3;
  const int b = eb + 3;
  if (a == b) return;
  int t = -1, k = -1;
  if (find_edge(a, b, t, k)) {
    mark_fixed(a, b);
    return;
  }
  const Vec2& pa = pts_[a];
  const Vec2& pb = pts_[b];
  // Collect the edges crossed by ab, walking from a.
  std::deque<std::pair<int, int>> crossing;
  int l = -1, r = -1, cur = -1;
  for (int tt : triangles_around(a)) {
    const auto& T = tris_[tt];
    int i = 0;
    while (T.v[i] != a) ++i;
    const int x = T.v[(i + 1) % 3];
    const int y = T.v[(i + 2) % 3];
    if (orient(pa, pts_[x], pb) > 0 && orient(pa, pts_[y], pb) < 0) {
      r = x;
      l = y;
      cur = tt;
      break;
    }
  }
  if (cur < 0) throw Error(ErrorCode::MeshQualityFailure, "constrained edge passes through a vertex");
  while (true) {
    crossing.emplace_back(l, r);
    const int n = tris_[cur].nbr[edge_index(cur, l, r)];
    if (n < 0) throw Error(ErrorCode::MeshQualityFailure, "constrained edge leaves the triangulation");
    const int z = tris_[n].v[edge_index(n, l, r)];
    if (z == b) break;
    const long double o = orient(pa, pb, pts_[z]);
    if (o == 0) throw Error(ErrorCode::MeshQualityFailure, "constrained edge passes through a vertex");
    if (o > 0) {
      l = z;
    } else {
      r = z;
    }
    cur = n;
  }
  std::size_t guard = 0;
  while (!crossing.empty()) {
    if (++guard > 100000 + 100 * crossing.size()) {
      throw Error(ErrorCode::MeshQualityFailure, "edge recovery did not converge");
    }
    const auto [u, w] = crossing.front();
    crossing.pop_front();
    int tt = -1, kk = -1;
    if (!find_edge(u, w, tt, kk)) continue;
    const int p = tris_[tt].v[kk];
    const int n = tris_[tt].nbr[kk];
    const int d = tris_[n].v[edge_index(n, u, w)];
    const Vec2& pp = pts_[p];
    const Vec2& pd = pts_[d];
    const bool convex = orient(pp, pd, pts_[u]) * orient(pp, pd, pts_[w]) < 0;
    if (!convex) {
      crossing.emplace_back(u, w);
      continue;
    }
    flip(tt, kk);
    if (p != a && p != b && d != a && d != b && proper_cross(pa, pb, pp, pd)) crossing.emplace_back(p, d);
  }
  mark_fixed(a, b);
}

void Cdt::carve() {
  std::vector<int> stack;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& T = tris_[t];
    if (!T.alive) continue;
    if (T.v[0] < 3 || T.v[1] < 3 || T.v[2] < 3) {
      tris_[t].outside = true;
      stack.push_back(static_cast<int>(t));
    }
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int k = 0; k < 3; ++k) {
      const int n = tris_[t].nbr[k];
      if (n < 0 || tris_[t].fixed[k] || tris_[n].outside) continue;
      tris_[n].outside = true;
      stack.push_back(n);
    }
  }
}

void Cdt::refine(const RefineOptions& opts) {
  const double angle_floor = opts.min_angle_deg * kPi / 180.0;
  std::deque<int> queue;
  for (std::size_t t = 0; t < tris_.size(); ++t) queue.push_back(static_cast<int>(t));
  auto bad = [&](int t) {
    const auto& T = tris_[t];
    if (!T.alive || T.outside) return false;
    const Vec2& a = pts_[T.v[0]];
    const Vec2& b = pts_[T.v[1]];
    const Vec2& c = pts_[T.v[2]];
    const Vec2 g = (a + b + c) / 3.0;
    if (opts.skip && opts.skip(g)) return false;
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (opts.too_big && opts.too_big(g, longest)) return true;
    return min_angle(a, b, c) < angle_floor;
  };
  auto enqueue_around = [&](int v) {
    for (int t : triangles_around(v)) queue.push_back(t);
  };
  auto split_fixed = [&](int a, int b) {
    int t = -1, k = -1;
    if (!find_edge(a, b, t, k)) return false;
    if ((pts_[a] - pts_[b]).norm() < 2.0 * opts.min_edge) return false;
    const int m = split_edge(t, k, 0.5 * (pts_[a] + pts_[b]));
    if (opts.on_split) opts.on_split(a - 3, b - 3, m - 3);
    enqueue_around(m);
    return true;
  };

  while (!queue.empty()) {
    if (pts_.size() > opts.max_vertices) {
      throw Error(ErrorCode::MeshQualityFailure, "refinement exceeded the vertex budget");
    }
    const int t = queue.front();
    queue.pop_front();
    if (!bad(t)) continue;
    const auto T = tris_[t];
    const Vec2& a = pts_[T.v[0]];
    const Vec2& b = pts_[T.v[1]];
    const Vec2& c = pts_[T.v[2]];
    const Vec2 g = (a + b + c) / 3.0;
    const Vec2 cc = circumcentre(a, b, c);
    // Walk from the centroid to the circumcentre; crossing a fixed edge means
    // the candidate encroaches on it.
    int cur = t;
    int hit_a = -1, hit_b = -1;
    int prev = -1;
    for (std::size_t steps = 0; steps < tris_.size() + 8; ++steps) {
      const auto& C = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int u = C.v[(k + 1) % 3];
        const int w = C.v[(k + 2) % 3];
        if (C.nbr[k] == prev && prev >= 0) continue;
        if (orient(pts_[u], pts_[w], cc) < 0 && orient(g, cc, pts_[u]) * orient(g, cc, pts_[w]) <= 0) {
          if (C.fixed[k] || C.nbr[k] < 0) {
            hit_a = u;
            hit_b = w;
          } else {
            next = C.nbr[k];
          }
          break;
        }
      }
      if (hit_a >= 0 || next < 0) break;
      prev = cur;
      cur = next;
    }
    if (hit_a < 0) {
      // Diametral-circle encroachment on fixed edges near the candidate.
      std::vector<int> near{cur};
      for (int k = 0; k < 3; ++k) {
        if (tris_[cur].nbr[k] >= 0) near.push_back(tris_[cur].nbr[k]);
      }
      for (int nt : near) {
        const auto& N = tris_[nt];
        for (int k = 0; k < 3 && hit_a < 0; ++k) {
          if (!N.fixed[k]) continue;
          const Vec2& u = pts_[N.v[(k + 1) % 3]];
          const Vec2& w = pts_[N.v[(k + 2) % 3]];
          if ((cc - 0.5 * (u + w)).norm() < 0.5 * (u - w).norm()) {
            hit_a = N.v[(k + 1) % 3];
            hit_b = N.v[(k + 2) % 3];
          }
        }
        if (hit_a >= 0) break;
      }
    }
    if (hit_a >= 0) {
      if (split_fixed(hit_a, hit_b)) queue.push_back(t);
      continue;
    }
    if (tris_[cur].outside) continue;
    const double shortest = std::min({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (shortest < opts.min_edge) continue;
    last_ = cur;
    const int before = static_cast<int>(pts_.size());
    const int id = insert(cc) + 3;
    if (id >= before) enqueue_around(id);
  }
}

void Cdt::smooth(const std::vector<char>& movable, int passes) {
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t v = 3; v < pts_.size(); ++v) {
      if (v - 3 >= movable.size() || !movable[v - 3]) continue;
      const auto around = triangles_around(static_cast<int>(v));
      Vec2 sum = Vec2::Zero();
      int count = 0;
      bool ok = true;
      for (int t : around) {
        if (tris_[t].outside) ok = false;
        for (int u : tris_[t].v) {
          if (u != static_cast<int>(v)) {
            sum += pts_[u];
            ++count;
          }
        }
      }
      if (!ok || count == 0) continue;
      const Vec2 old = pts_[v];
      pts_[v] = sum / count;
      for (int t : around) {
        const auto& T = tris_[t];
        if (orient(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]) <= 0) {
          pts_[v] = old;
          break;
        }
      }
    }
    restore_delaunay();
  }
}

void Cdt::restore_delaunay() {
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        const Triangle& T = tris_[t];
        const int n = T.nbr[k];
        if (n < 0 || T.fixed[k] || T.outside != tris_[n].outside) continue;
        const int d = tris_[n].v[edge_index(n, T.v[(k + 1) % 3], T.v[(k + 2) % 3])];
        if (incircle(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], pts_[d]) <= 0) continue;
        flip(static_cast<int>(t), k);
        changed = true;
      }
    }
    if (!changed) return;
  }
}

std::vector<std::array<int, 3>> Cdt::inside_triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& T : tris_) {
    if (!T.alive || T.outside) continue;
    out.push_back({T.v[0] - 3, T.v[1] - 3, T.v[2] - 3});
  }
  return out;
}

}  // namespace neumann::detail
