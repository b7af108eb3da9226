#pragma once

#include "gscm/geometry.hpp"

#include <cmath>
#include <string_view>

namespace gscm {

/// How a ray with several boundary crossings is resolved.
enum class Mode { exact, under, over };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

/// Rays from a common start point C at angles in (0, 2*pi], strictly
/// increasing. An input angle of 0 (or any multiple of 2*pi) is stored as 2*pi.
class LineSet {
 public:
  LineSet(Point center, VecX angles);

  /// theta_i = 2*pi*i/p for i = 1..p.
  static LineSet evenly(Point center, int p);

  const Point& center() const { return center_; }
  const VecX& angles() const { return angles_; }
  int size() const { return static_cast<int>(angles_.size()); }
  Point direction(int i) const { return {std::cos(angles_[i]), std::sin(angles_[i])}; }

  LineSet with_center(Point c) const { return LineSet(c, angles_, Unchecked{}); }

 private:
  struct Unchecked {};
  LineSet(Point center, VecX angles, Unchecked) : center_(center), angles_(std::move(angles)) {}

  Point center_;
  VecX angles_;
};

/// Contour through C + y_i (cos theta_i, sin theta_i). Lengths must be
/// positive and finite. Throws GeometryError if the points do not form a
/// simple polygon (only possible when some angular gap is at least pi).
Polygon points_from_lengths(const LineSet& lines, const VecX& lengths);

/// Lengths y_i along each line. Exact mode needs C strictly inside the
/// kernel; under and over need C strictly inside the polygon and take the
/// nearest and farthest crossing respectively. Throws StartPointError.
VecX star_lengths(const Polygon& poly, const LineSet& lines, Mode mode);

Polygon reconstruct(const Polygon& poly, const LineSet& lines, Mode mode);

/// Area of the symmetric difference between a contour and its reconstruction.
double differing_area(const Polygon& poly, const LineSet& lines, Mode mode);

/// Symmetric difference area between two polygons that are both star-shaped
/// with respect to `center`, with the center strictly inside both kernels.
/// Runs in O((n + m) log(n + m)).
double star_difference_area(const Polygon& a, const Polygon& b, const Point& center);

/// Exact-mode helpers for a contour whose kernel strictly contains `center`.
/// The profile answers radius queries along arbitrary directions.
class RadialProfile {
 public:
  RadialProfile(const Polygon& poly, const Point& center);

  double radius(double angle) const;
  VecX radii(const VecX& angles) const;
  std::span<const Point> relative_vertices() const { return rel_; }
  std::span<const double> vertex_angles() const { return ang_; }
  const Point& center() const { return center_; }

  /// Index k of the edge rel_[k] -> rel_[k+1] (cyclic) containing `angle`.
  std::size_t edge_at(double angle) const;
  /// Point on edge k (relative to the center) along direction `angle`.
  Point point_on_edge(std::size_t k, double angle) const;

 private:
  Point center_;
  std::vector<Point> rel_;
  std::vector<double> ang_;  // ascending in [0, 2*pi)
};

}  // namespace gscm
