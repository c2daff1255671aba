#include "panocal/camloc/delaunay.hpp"

#include <algorithm>
#include <cmath>

#include "panocal/errors.hpp"

namespace panocal::camloc {

namespace {

struct Tri {
  int a, b, c;
  bool alive = true;
};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when p is strictly inside the circumcircle of (a, b, c) given CCW order
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Vec2> points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw DegenerateInput("delaunay: need >= 3 points");

  // normalize into [-1, 1] for well-conditioned predicates
  Vec2 lo = points[0], hi = points[0];
  for (const Vec2& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 center = 0.5 * (lo + hi);
  const double scale = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  std::vector<Vec2> pts(n + 3);
  for (int i = 0; i < n; ++i) pts[i] = (points[i] - center) * (2.0 / scale);

  bool collinear = true;
  for (int i = 1; i + 1 < n && collinear; ++i) {
    for (int j = i + 1; j < n && collinear; ++j) {
      if (std::abs(orient2d(pts[0], pts[i], pts[j])) > 1e-12) collinear = false;
    }
  }
  if (collinear) throw DegenerateInput("delaunay: collinear points");

  // big enclosing triangle
  const double big = 64.0;
  pts[n] = Vec2(0, 3 * big);
  pts[n + 1] = Vec2(-3 * big, -2 * big);
  pts[n + 2] = Vec2(3 * big, -2 * big);

  std::vector<Tri> tris;
  tris.push_back({n, n + 1, n + 2});

  auto ccw = [&](Tri& t) {
    if (orient2d(pts[t.a], pts[t.b], pts[t.c]) < 0) std::swap(t.b, t.c);
  };

  for (int ip = 0; ip < n; ++ip) {
    // cavity: triangles whose circumcircle contains the new point
    std::vector<std::pair<int, int>> boundary;  // directed edges seen once
    auto add_edge = [&boundary](int u, int v) {
      for (auto it = boundary.begin(); it != boundary.end(); ++it) {
        if (it->first == v && it->second == u) {
          boundary.erase(it);
          return;
        }
      }
      boundary.emplace_back(u, v);
    };
    bool any = false;
    for (Tri& t : tris) {
      if (!t.alive) continue;
      if (incircle(pts[t.a], pts[t.b], pts[t.c], pts[ip]) > 0) {
        t.alive = false;
        add_edge(t.a, t.b);
        add_edge(t.b, t.c);
        add_edge(t.c, t.a);
        any = true;
      }
    }
    if (!any) {
      // numerically on an edge: fall back to the containing triangle
      for (Tri& t : tris) {
        if (!t.alive) continue;
        if (incircle(pts[t.a], pts[t.b], pts[t.c], pts[ip]) >= 0) {
          t.alive = false;
          add_edge(t.a, t.b);
          add_edge(t.b, t.c);
          add_edge(t.c, t.a);
          break;
        }
      }
    }
    for (auto [u, v] : boundary) {
      Tri t{u, v, ip};
      ccw(t);
      tris.push_back(t);
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris) {
    if (!t.alive || t.a >= n || t.b >= n || t.c >= n) continue;
    std::array<int, 3> tri = {t.a, t.b, t.c};
    std::sort(tri.begin(), tri.end());
    out.push_back(tri);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triangle2D> delaunay_2d(std::span<const Vec2> detections, double min_angle_deg,
                                    double max_edge_ratio) {
  std::vector<Triangle2D> out;
  for (const auto& tri : delaunay_triangulation(detections)) {
    const Vec2& a = detections[tri[0]];
    const Vec2& b = detections[tri[1]];
    const Vec2& c = detections[tri[2]];
    Triangle2D t;
    t.v = tri;
    t.edges_sorted = {(b - c).norm(), (a - c).norm(), (a - b).norm()};
    std::sort(t.edges_sorted.begin(), t.edges_sorted.end());
    const double e0 = t.edges_sorted[0], e1 = t.edges_sorted[1], e2 = t.edges_sorted[2];
    if (e0 <= 0) continue;
    t.edge_ratio = e2 / e0;
    // smallest angle is opposite the shortest edge
    const double cos_min = (e1 * e1 + e2 * e2 - e0 * e0) / (2 * e1 * e2);
    t.min_angle_deg = rad2deg(std::acos(std::clamp(cos_min, -1.0, 1.0)));
    if (t.min_angle_deg <= min_angle_deg || t.edge_ratio >= max_edge_ratio) continue;
    out.push_back(t);
  }
  return out;
}

}  // namespace panocal::camloc
