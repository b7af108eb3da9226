#include "gscm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gscm {

namespace {

double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

}  // namespace

Bounds Bounds::of(std::span<const Point> pts) {
  Bounds b{pts.front(), pts.front()};
  for (const auto& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

double signed_area(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shoelace relative to the first vertex for better conditioning.
  const Point& o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(ring[i] - o, ring[i + 1] - o);
  return 0.5 * twice;
}

bool is_simple(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  struct Edge {
    double xmin, xmax;
    std::size_t i;
  };
  std::vector<Edge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    edges[i] = {std::min(a.x(), b.x()), std::max(a.x(), b.x()), i};
  }
  // Adjacent edges may only share their common vertex.
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    const Point& c = ring[(i + 2) % n];
    if (orient(a, b, c) == 0 && (a - b).dot(c - b) > 0) return false;
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.xmin < r.xmin; });
  for (std::size_t u = 0; u < n; ++u) {
    const auto& eu = edges[u];
    for (std::size_t v = u + 1; v < n && edges[v].xmin <= eu.xmax; ++v) {
      const auto& ev = edges[v];
      const std::size_t lo = std::min(eu.i, ev.i);
      const std::size_t hi = std::max(eu.i, ev.i);
      if (hi == lo + 1 || (lo == 0 && hi == n - 1)) continue;
      if (segments_touch(ring[eu.i], ring[(eu.i + 1) % n], ring[ev.i], ring[(ev.i + 1) % n])) return false;
    }
  }
  return true;
}

Polygon::Polygon(std::vector<Point> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw GeometryError("polygon has non-finite coordinates");
  }
  std::vector<Point> clean;
  clean.reserve(points.size());
  for (const auto& p : points) {
    if (clean.empty() || (p - clean.back()).norm() > 1e-12) clean.push_back(p);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12) clean.pop_back();
  if (clean.size() < 3) throw GeometryError("polygon needs more than two distinct points");
  const double a = signed_area(clean);
  if (std::abs(a) <= 1e-300) throw GeometryError("polygon has zero area");
  if (!is_simple(clean)) throw GeometryError("polygon boundary self-intersects");
  if (a < 0) std::reverse(clean.begin(), clean.end());
  *this = trusted(std::move(clean));
}

Polygon Polygon::trusted(std::vector<Point> ccw_points) {
  Polygon poly;
  poly.points_ = std::move(ccw_points);
  poly.area_ = signed_area(poly.points_);
  if (!poly.points_.empty()) poly.bounds_ = Bounds::of(poly.points_);
  return poly;
}

double polygon_area(const Polygon& poly) {
  if (poly.size() < 3 || !(poly.area() > 0)) throw GeometryError("degenerate polygon");
  return poly.area();
}

Location point_in_polygon(const Point& p, const Polygon& poly) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if (point_segment_distance(p, a, b) <= kGeomTol) return Location::on_boundary;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside ? Location::inside : Location::outside;
}

std::vector<RayHit> ray_hits(const Point& origin, const Point& u, const Polygon& poly) {
  std::vector<RayHit> hits;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly.vertex(i + 1);
    const Point r = b - a;
    const Point ac = a - origin;
    const double denom = cross(u, r);
    const double len = r.norm();
    if (std::abs(denom) <= 1e-14 * len) {
      // Parallel: only a collinear overlap contributes, through its endpoints.
      if (std::abs(cross(ac, u)) <= kGeomTol) {
        for (const Point* q : {&a, &b}) {
          const double t = (*q - origin).dot(u);
          if (t > kGeomTol) hits.push_back({t, *q});
        }
      }
      continue;
    }
    const double t = cross(ac, r) / denom;
    const double s = cross(ac, u) / denom;
    const double stol = kGeomTol / len;
    if (t > kGeomTol && s >= -stol && s <= 1.0 + stol) {
      const double sc = std::clamp(s, 0.0, 1.0);
      hits.push_back({t, a + sc * r});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const RayHit& l, const RayHit& r) { return l.distance < r.distance; });
  std::vector<RayHit> unique;
  unique.reserve(hits.size());
  for (const auto& h : hits) {
    if (unique.empty() || h.distance - unique.back().distance > kGeomTol) unique.push_back(h);
  }
  return unique;
}

std::vector<RayHit> ray_polygon_intersections(const Point& origin, double angle, const Polygon& poly) {
  if (point_in_polygon(origin, poly) != Location::inside) {
    throw StartPointError("ray origin must lie strictly inside the polygon");
  }
  return ray_hits(origin, Point(std::cos(angle), std::sin(angle)), poly);
}

bool in_kernel(const Point& c, const Polygon& poly, double margin) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point e = poly.vertex(i + 1) - a;
    if (cross(e, c - a) / e.norm() <= margin) return false;
  }
  return true;
}

}  // namespace gscm
