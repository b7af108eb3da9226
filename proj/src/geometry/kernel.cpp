#include "gscm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace gscm {

namespace {

struct HalfPlane {
  Point p;
  Point d;  // unit direction; the feasible side is to the left
  double angle;
};

constexpr double kSideTol = 1e-12;

bool outside(const HalfPlane& h, const Point& x) { return cross(h.d, x - h.p) < -kSideTol; }

Point meet(const HalfPlane& a, const HalfPlane& b) {
  const double t = cross(b.d, a.p - b.p) / cross(a.d, b.d);
  return a.p + t * a.d;
}

void add_edges(const Polygon& poly, std::vector<HalfPlane>& out) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point e = poly.vertex(i + 1) - a;
    const double len = e.norm();
    if (len <= 0) continue;
    const Point d = e / len;
    out.push_back({a, d, std::atan2(d.y(), d.x())});
  }
}

void add_box(const Bounds& b, std::vector<HalfPlane>& out) {
  const Point lo = b.lo - Point(1.0, 1.0);
  const Point hi = b.hi + Point(1.0, 1.0);
  const Point corners[4] = {lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
  for (int k = 0; k < 4; ++k) {
    const Point d = (corners[(k + 1) % 4] - corners[k]).normalized();
    out.push_back({corners[k], d, std::atan2(d.y(), d.x())});
  }
}

std::optional<Polygon> intersect(std::vector<HalfPlane> planes) {
  std::sort(planes.begin(), planes.end(), [](const HalfPlane& a, const HalfPlane& b) { return a.angle < b.angle; });

  // Among (nearly) equal directions keep only the most restrictive plane.
  std::vector<HalfPlane> hs;
  hs.reserve(planes.size());
  for (const auto& h : planes) {
    if (!hs.empty() && std::abs(h.angle - hs.back().angle) < 1e-12) {
      if (cross(hs.back().d, h.p - hs.back().p) > 0) hs.back() = h;
      continue;
    }
    hs.push_back(h);
  }
  if (hs.size() > 1 && std::abs(hs.front().angle + kTwoPi - hs.back().angle) < 1e-12) {
    if (cross(hs.front().d, hs.back().p - hs.front().p) > 0) hs.front() = hs.back();
    hs.pop_back();
  }

  std::deque<HalfPlane> dq;
  for (const auto& h : hs) {
    while (dq.size() >= 2 && outside(h, meet(dq[dq.size() - 2], dq.back()))) dq.pop_back();
    while (dq.size() >= 2 && outside(h, meet(dq[0], dq[1]))) dq.pop_front();
    if (!dq.empty() && std::abs(cross(dq.back().d, h.d)) < 1e-12) {
      // Opposite directions adjacent in the deque: the region collapsed.
      if (dq.back().d.dot(h.d) < 0) return std::nullopt;
      continue;
    }
    dq.push_back(h);
  }
  while (dq.size() >= 3 && outside(dq.front(), meet(dq[dq.size() - 2], dq.back()))) dq.pop_back();
  while (dq.size() >= 3 && outside(dq.back(), meet(dq[0], dq[1]))) dq.pop_front();
  if (dq.size() < 3) return std::nullopt;

  std::vector<Point> verts;
  verts.reserve(dq.size());
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const Point v = meet(dq[i], dq[(i + 1) % dq.size()]);
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) return std::nullopt;
    if (verts.empty() || (v - verts.back()).norm() > 1e-12) verts.push_back(v);
  }
  while (verts.size() > 1 && (verts.front() - verts.back()).norm() <= 1e-12) verts.pop_back();
  if (verts.size() < 3) return std::nullopt;
  if (signed_area(verts) < 1e-16) return std::nullopt;
  return Polygon::trusted(std::move(verts));
}

}  // namespace

std::optional<Polygon> polygon_kernel(const Polygon& poly) {
  if (poly.size() < 3) throw GeometryError("degenerate polygon");
  std::vector<HalfPlane> planes;
  planes.reserve(poly.size() + 4);
  add_edges(poly, planes);
  add_box(poly.bounds(), planes);
  return intersect(std::move(planes));
}

std::optional<Polygon> kernel_intersection(std::span<const Polygon> polys) {
  if (polys.empty()) throw GeometryError("no polygons");
  std::vector<HalfPlane> planes;
  Bounds box = polys.front().bounds();
  for (const auto& poly : polys) {
    if (poly.size() < 3) throw GeometryError("degenerate polygon");
    add_edges(poly, planes);
    box.lo = box.lo.cwiseMin(poly.bounds().lo);
    box.hi = box.hi.cwiseMax(poly.bounds().hi);
  }
  add_box(box, planes);
  return intersect(std::move(planes));
}

}  // namespace gscm
