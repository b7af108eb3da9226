#pragma once

#include "gscm/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gscm {

struct Bounds {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  bool covers(const Bounds& other, double tol = kGeomTol) const {
    return other.lo.x() >= lo.x() - tol && other.lo.y() >= lo.y() - tol && other.hi.x() <= hi.x() + tol &&
           other.hi.y() <= hi.y() + tol;
  }
  static Bounds of(std::span<const Point> pts);
};

/// Closed simple polygon given by its boundary vertices. The last vertex
/// connects back to the first; vertices are stored counterclockwise.
///
/// The checked constructor removes an explicit closing vertex and repeated
/// consecutive vertices, rejects fewer than three points, non-finite
/// coordinates, self-intersections and zero area, and reverses clockwise
/// input.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point> points);

  /// Skips validation. The caller guarantees a simple counterclockwise ring.
  static Polygon trusted(std::vector<Point> ccw_points);

  std::span<const Point> vertices() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Point& vertex(std::size_t i) const { return points_[i % points_.size()]; }

  double area() const { return area_; }
  const Bounds& bounds() const { return bounds_; }

 private:
  std::vector<Point> points_;
  double area_ = 0.0;
  Bounds bounds_;
};

/// Ordered closed boundary points; same invariants as a polygon boundary.
using ContourPointSequence = Polygon;

double signed_area(std::span<const Point> ring);
bool is_simple(std::span<const Point> ring);

/// Area enclosed by the polygon. Throws GeometryError for an empty polygon.
double polygon_area(const Polygon& poly);

enum class Location { inside, outside, on_boundary };

Location point_in_polygon(const Point& p, const Polygon& poly);

struct RayHit {
  double distance = 0.0;
  Point point{0.0, 0.0};
};

/// All points where the ray from `origin` at `angle` meets the closed
/// boundary, ascending by distance. Hits within kGeomTol of each other (a
/// ray through a vertex) are reported once. Throws StartPointError unless
/// `origin` is strictly inside.
std::vector<RayHit> ray_polygon_intersections(const Point& origin, double angle, const Polygon& poly);

/// Unchecked variant of the above taking a unit direction.
std::vector<RayHit> ray_hits(const Point& origin, const Point& unit_dir, const Polygon& poly);

/// True when `c` lies on the interior side of every edge line by more than
/// `margin` (use a negative margin for the closed kernel).
bool in_kernel(const Point& c, const Polygon& poly, double margin = kGeomTol);

/// Kernel as a convex polygon; empty when the polygon is not star-shaped or
/// the kernel has no interior.
std::optional<Polygon> polygon_kernel(const Polygon& poly);

/// Intersection of all kernels (the feasible set for a common start point).
std::optional<Polygon> kernel_intersection(std::span<const Polygon> polys);

/// Area of (P \ Q) union (Q \ P).
double symmetric_difference_area(const Polygon& p, const Polygon& q);

/// Integral of |w_P - w_Q| over the plane, where w is the winding number of
/// each closed ring. Equals the symmetric difference area for simple rings
/// of the same orientation; rings need not be validated.
double winding_difference_area(std::span<const Point> p, std::span<const Point> q);

// ---------------------------------------------------------------------------
// Rasters. Cell (row i, col j) spans x in [ox + j*cell, ox + (j+1)*cell] and
// y in [oy + i*cell, oy + (i+1)*cell]; row 0 is the bottom row.

struct GridGeometry {
  int rows = 0;
  int cols = 0;
  Point origin{0.0, 0.0};
  double cell = 1.0;

  Point cell_center(int i, int j) const {
    return {origin.x() + (j + 0.5) * cell, origin.y() + (i + 0.5) * cell};
  }
  Bounds bounds() const { return {origin, origin + Point(cols * cell, rows * cell)}; }
  bool operator==(const GridGeometry&) const = default;
  void validate() const;
};

class BinaryGrid {
 public:
  BinaryGrid() = default;
  explicit BinaryGrid(GridGeometry geom) : geom_(geom), values_(static_cast<std::size_t>(geom.rows) * geom.cols, 0) {
    geom_.validate();
  }

  const GridGeometry& geometry() const { return geom_; }
  int rows() const { return geom_.rows; }
  int cols() const { return geom_.cols; }

  bool operator()(int i, int j) const { return values_[index(i, j)] != 0; }
  void set(int i, int j, bool v) { values_[index(i, j)] = v ? 1 : 0; }
  /// False outside the grid.
  bool at_or_false(int i, int j) const {
    return i >= 0 && j >= 0 && i < geom_.rows && j < geom_.cols && (*this)(i, j);
  }
  std::size_t count() const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * geom_.cols + j; }

  GridGeometry geom_;
  std::vector<std::uint8_t> values_;
};

/// Exact fraction of each cell's area inside the polygon (rows x cols).
/// Portions of the polygon outside the window are ignored.
MatX cell_coverage(const Polygon& poly, const GridGeometry& geom);

/// Cells whose covered fraction exceeds one half (exactly half is outside).
/// Throws WindowError when the window does not cover the polygon.
BinaryGrid contour_to_grid(const Polygon& poly, const GridGeometry& geom);

/// Boundary trace of the single 4-connected true region, counterclockwise,
/// starting at the lower-left corner of the lowest-row, lowest-column cell,
/// with collinear corner points merged. Throws GeometryError for zero or
/// several regions and for regions with holes.
Polygon grid_to_contour(const BinaryGrid& grid);

/// Number of 4-connected true regions.
int count_regions(const BinaryGrid& grid);

/// Keeps only the largest 4-connected true region (ties: the one whose
/// first cell in row-major order comes first). Empty grid stays empty.
BinaryGrid largest_region(const BinaryGrid& grid);

/// Sets every false cell that is not 4-connected to the outside to true.
BinaryGrid fill_holes(const BinaryGrid& grid);

bool has_holes(const BinaryGrid& grid);

}  // namespace gscm
