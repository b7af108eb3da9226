#pragma once

// Independent reference computations used as oracles by the test suites.
// Nothing here calls into the library's geometry routines.

#include "gscm/core.hpp"
#include "gscm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using gscm::Point;

inline bool inside_even_odd(const std::vector<Point>& ring, double x, double y) {
  bool in = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if ((a.y() > y) != (b.y() > y)) {
      const double xc = a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (x < xc) in = !in;
    }
  }
  return in;
}

struct Box {
  Point lo, hi;
};

inline Box box_of(const std::vector<std::vector<Point>>& rings) {
  Box b{rings[0][0], rings[0][0]};
  for (const auto& r : rings) {
    for (const auto& p : r) {
      b.lo = b.lo.cwiseMin(p);
      b.hi = b.hi.cwiseMax(p);
    }
  }
  return b;
}

/// Area estimate by counting res x res cell centres over the bounding box.
inline double raster_area(const std::vector<Point>& ring, int res) {
  const Box b = box_of({ring});
  const double dx = (b.hi.x() - b.lo.x()) / res;
  const double dy = (b.hi.y() - b.lo.y()) / res;
  long count = 0;
  for (int i = 0; i < res; ++i) {
    const double y = b.lo.y() + (i + 0.5) * dy;
    for (int j = 0; j < res; ++j) {
      if (inside_even_odd(ring, b.lo.x() + (j + 0.5) * dx, y)) ++count;
    }
  }
  return count * dx * dy;
}

/// Symmetric difference estimate by centre counting over the joint box.
inline double raster_sym_diff(const std::vector<Point>& p, const std::vector<Point>& q, int res) {
  const Box b = box_of({p, q});
  const double dx = (b.hi.x() - b.lo.x()) / res;
  const double dy = (b.hi.y() - b.lo.y()) / res;
  long count = 0;
  for (int i = 0; i < res; ++i) {
    const double y = b.lo.y() + (i + 0.5) * dy;
    for (int j = 0; j < res; ++j) {
      const double x = b.lo.x() + (j + 0.5) * dx;
      if (inside_even_odd(p, x, y) != inside_even_odd(q, x, y)) ++count;
    }
  }
  return count * dx * dy;
}

inline double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline bool proper_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// Brute-force visibility: x is inside the ring and the segment from x to
/// every vertex and every edge midpoint crosses no edge. Midpoints matter at
/// reflex vertices, where a point behind an edge's supporting line can still
/// see both of the edge's endpoints.
inline bool sees_all_vertices(const std::vector<Point>& ring, const Point& x) {
  if (!inside_even_odd(ring, x.x(), x.y())) return false;
  const std::size_t n = ring.size();
  for (std::size_t v = 0; v < n; ++v) {
    const Point mid = 0.5 * (ring[v] + ring[(v + 1) % n]);
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t f = (e + 1) % n;
      if (e != v && f != v && proper_cross(x, ring[v], ring[e], ring[f])) return false;
      if (e != v && proper_cross(x, mid, ring[e], ring[f])) return false;
    }
  }
  return true;
}

/// Grid of res x res candidate centres over the ring's bounding box; true
/// where the candidate sees every vertex.
struct VisibilityGrid {
  Box box;
  int res = 0;
  std::vector<char> visible;
  double cell_area() const { return (box.hi.x() - box.lo.x()) * (box.hi.y() - box.lo.y()) / (double(res) * res); }
  Point centre(int i, int j) const {
    return {box.lo.x() + (j + 0.5) * (box.hi.x() - box.lo.x()) / res,
            box.lo.y() + (i + 0.5) * (box.hi.y() - box.lo.y()) / res};
  }
  long count() const { return std::count(visible.begin(), visible.end(), 1); }
};

inline VisibilityGrid visibility_grid(const std::vector<std::vector<Point>>& rings, int res) {
  VisibilityGrid g{box_of(rings), res, std::vector<char>(static_cast<std::size_t>(res) * res, 0)};
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const Point x = g.centre(i, j);
      bool all = true;
      for (const auto& r : rings) {
        if (!sees_all_vertices(r, x)) {
          all = false;
          break;
        }
      }
      g.visible[static_cast<std::size_t>(i) * res + j] = all ? 1 : 0;
    }
  }
  return g;
}

/// Distances at which the ray from c along angle crosses the ring, found by
/// sampling the boundary densely and locating sign changes of the side test.
inline std::vector<double> dense_ray_crossings(const std::vector<Point>& ring, const Point& c, double angle,
                                               long samples) {
  const Point u(std::cos(angle), std::sin(angle));
  const std::size_t n = ring.size();
  double perimeter = 0;
  for (std::size_t i = 0; i < n; ++i) perimeter += (ring[(i + 1) % n] - ring[i]).norm();
  std::vector<Point> pts;
  pts.reserve(samples);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[(i + 1) % n];
    const long m = std::max(1L, static_cast<long>(samples * (b - a).norm() / perimeter));
    for (long k = 0; k < m; ++k) pts.push_back(a + (b - a) * (double(k) / m));
  }
  std::vector<double> out;
  const double tol = 4.0 * perimeter / samples;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Point& p = pts[k];
    const Point& q = pts[(k + 1) % pts.size()];
    const double sp = u.x() * (p.y() - c.y()) - u.y() * (p.x() - c.x());
    const double sq = u.x() * (q.y() - c.y()) - u.y() * (q.x() - c.x());
    if ((sp <= 0) == (sq <= 0)) continue;
    const Point m = 0.5 * (p + q);
    const double t = (m - c).dot(u);
    if (t <= 0) continue;
    if (out.empty() || std::abs(t - out.back()) > tol) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random polygon star-shaped about `c`: sorted random angles with random radii.
inline std::vector<Point> random_star(gscm::Rng& rng, int n, const Point& c, double rmin, double rmax) {
  std::vector<double> ang(n);
  for (;;) {
    for (auto& a : ang) a = rng.uniform(0.0, gscm::kTwoPi);
    std::sort(ang.begin(), ang.end());
    double gap = ang[0] + gscm::kTwoPi - ang[n - 1];
    bool distinct = true;
    for (int i = 1; i < n; ++i) {
      gap = std::max(gap, ang[i] - ang[i - 1]);
      if (ang[i] - ang[i - 1] < 1e-3) distinct = false;
    }
    if (distinct && gap < 0.9 * gscm::kPi) break;
  }
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    const double r = rng.uniform(rmin, rmax);
    pts[i] = c + r * Point(std::cos(ang[i]), std::sin(ang[i]));
  }
  return pts;
}

}  // namespace oracle
