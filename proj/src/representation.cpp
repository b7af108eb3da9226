#include "gscm/representation.hpp"

#include <algorithm>
#include <cmath>

namespace gscm {

Mode parse_mode(std::string_view name) {
  if (name == "exact") return Mode::exact;
  if (name == "under") return Mode::under;
  if (name == "over") return Mode::over;
  throw ParseError("unknown representation mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::exact:
      return "exact";
    case Mode::under:
      return "under";
    case Mode::over:
      return "over";
  }
  return "exact";
}

LineSet::LineSet(Point center, VecX angles) : center_(center), angles_(std::move(angles)) {
  if (!std::isfinite(center_.x()) || !std::isfinite(center_.y())) throw ModelError("line center must be finite");
  if (angles_.size() < 3) throw ModelError("a line set needs more than two lines");
  for (Index i = 0; i < angles_.size(); ++i) {
    double a = angles_[i];
    if (!std::isfinite(a)) throw ModelError("line angles must be finite");
    // Values printed at finite precision may overshoot 2pi slightly.
    if (a > kTwoPi && a <= kTwoPi + 1e-9) {
      a = kTwoPi;
    } else {
      a = std::fmod(a, kTwoPi);
      if (a <= 0.0) a += kTwoPi;
    }
    angles_[i] = a;
    if (i > 0 && !(angles_[i] > angles_[i - 1])) throw ModelError("line angles must be strictly increasing");
  }
}

LineSet LineSet::evenly(Point center, int p) {
  if (p < 3) throw ModelError("a line set needs more than two lines");
  VecX angles(p);
  for (int i = 0; i + 1 < p; ++i) angles[i] = kTwoPi * (i + 1) / p;
  angles[p - 1] = kTwoPi;
  return LineSet(center, std::move(angles), Unchecked{});
}

Polygon points_from_lengths(const LineSet& lines, const VecX& lengths) {
  const int p = lines.size();
  if (lengths.size() != p) throw ModelError("length vector does not match the line set");
  std::vector<Point> pts(p);
  double max_gap = lines.angles()[0] + kTwoPi - lines.angles()[p - 1];
  for (int i = 0; i < p; ++i) {
    const double y = lengths[i];
    if (!(y > 0) || !std::isfinite(y)) throw ModelError("lengths must be positive and finite");
    pts[i] = lines.center() + y * lines.direction(i);
    if (i > 0) max_gap = std::max(max_gap, lines.angles()[i] - lines.angles()[i - 1]);
  }
  if (max_gap < kPi) return Polygon::trusted(std::move(pts));
  return Polygon(std::move(pts));
}

RadialProfile::RadialProfile(const Polygon& poly, const Point& center) : center_(center) {
  const std::size_t n = poly.size();
  if (n < 3) throw GeometryError("degenerate polygon");
  std::size_t first = 0;
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point r = poly[i] - center;
    double a = std::atan2(r.y(), r.x());
    if (a < 0) a += kTwoPi;
    raw[i] = a;
    if (a < raw[first]) first = i;
  }
  rel_.reserve(n);
  ang_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (first + k) % n;
    rel_.push_back(poly[i] - center);
    ang_.push_back(raw[i]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const bool increasing = k + 1 == n || ang_[k + 1] > ang_[k];
    if (!increasing || !(cross(rel_[k], rel_[(k + 1) % n]) > 0)) {
      throw StartPointError("start point is not inside the kernel");
    }
  }
}

std::size_t RadialProfile::edge_at(double angle) const {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0) a += kTwoPi;
  const auto it = std::upper_bound(ang_.begin(), ang_.end(), a);
  if (it == ang_.begin()) return ang_.size() - 1;
  return static_cast<std::size_t>(it - ang_.begin()) - 1;
}

Point RadialProfile::point_on_edge(std::size_t k, double angle) const {
  const Point& a = rel_[k];
  const Point e = rel_[(k + 1) % rel_.size()] - a;
  const Point u(std::cos(angle), std::sin(angle));
  return (cross(a, e) / cross(u, e)) * u;
}

double RadialProfile::radius(double angle) const { return point_on_edge(edge_at(angle), angle).norm(); }

VecX RadialProfile::radii(const VecX& angles) const {
  VecX out(angles.size());
  for (Index i = 0; i < angles.size(); ++i) out[i] = radius(angles[i]);
  return out;
}

VecX star_lengths(const Polygon& poly, const LineSet& lines, Mode mode) {
  const Point& c = lines.center();
  if (mode == Mode::exact) {
    if (!in_kernel(c, poly)) throw StartPointError("exact mode needs the start point strictly inside the kernel");
    return RadialProfile(poly, c).radii(lines.angles());
  }
  if (point_in_polygon(c, poly) != Location::inside) {
    throw StartPointError("start point must lie strictly inside the contour");
  }
  VecX out(lines.size());
  for (int i = 0; i < lines.size(); ++i) {
    const auto hits = ray_hits(c, lines.direction(i), poly);
    if (hits.empty()) throw GeometryError("ray from an interior point missed the boundary");
    out[i] = mode == Mode::under ? hits.front().distance : hits.back().distance;
  }
  return out;
}

Polygon reconstruct(const Polygon& poly, const LineSet& lines, Mode mode) {
  return points_from_lengths(lines, star_lengths(poly, lines, mode));
}

double star_difference_area(const Polygon& a, const Polygon& b, const Point& center) {
  const RadialProfile pa(a, center);
  const RadialProfile pb(b, center);
  std::vector<double> breaks(pa.vertex_angles().begin(), pa.vertex_angles().end());
  breaks.insert(breaks.end(), pb.vertex_angles().begin(), pb.vertex_angles().end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(breaks.front() + kTwoPi);

  double total = 0.0;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double lo = breaks[j];
    const double hi = breaks[j + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const std::size_t ka = pa.edge_at(mid);
    const std::size_t kb = pb.edge_at(mid);
    const Point sa = pa.point_on_edge(ka, lo);
    const Point sb = pa.point_on_edge(ka, hi);
    const Point va = pb.point_on_edge(kb, lo);
    const Point vb = pb.point_on_edge(kb, hi);
    const double da = sa.norm() - va.norm();
    const double db = sb.norm() - vb.norm();
    const Point es = sb - sa;
    const Point ev = vb - va;
    const double denom = cross(es, ev);
    if (((da > 0 && db < 0) || (da < 0 && db > 0)) && denom != 0) {
      const Point x = sa + (cross(va - sa, ev) / denom) * es;
      total += 0.5 * (std::abs(cross(sa, x) - cross(va, x)) + std::abs(cross(x, sb) - cross(x, vb)));
    } else {
      total += 0.5 * std::abs(cross(sa, sb) - cross(va, vb));
    }
  }
  return total;
}

double differing_area(const Polygon& poly, const LineSet& lines, Mode mode) {
  const Polygon rec = reconstruct(poly, lines, mode);
  if (mode == Mode::exact || in_kernel(lines.center(), poly)) return star_difference_area(poly, rec, lines.center());
  return symmetric_difference_area(poly, rec);
}

}  // namespace gscm
