#pragma once

#include "gscm/model.hpp"

namespace gscm {

/// M evenly spaced test lines from a common point, offset half a spacing
/// from angle zero.
class TestLineSet {
 public:
  TestLineSet(Point center, int m);

  const Point& center() const { return center_; }
  int size() const { return m_; }
  double angle(int k) const { return kPi / m_ + k * kTwoPi / m_; }

 private:
  Point center_;
  int m_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t, double tol = kGeomTol) const { return t >= lo - tol && t <= hi + tol; }
  bool operator==(const Interval&) const = default;
};

/// Distances along the ray from `origin` at `angle` that lie in member cells
/// (cells closed), as sorted disjoint intervals. The ray is followed to the
/// edge of the grid window; the origin must lie inside the window.
std::vector<Interval> interval_on_line(const BinaryGrid& region, const Point& origin, double angle);

/// True when every crossing of the ray with the contour lies in `intervals`.
/// Throws StartPointError when the origin is not strictly inside.
bool coverage_indicator(const Polygon& contour, const std::vector<Interval>& intervals, const Point& origin,
                        double angle);
bool coverage_indicator(const Polygon& contour, const BinaryGrid& region, const Point& origin, double angle);

struct CoverageReport {
  double alpha = 0.0;
  Eigen::MatrixXi w;     // contours x lines, 0 or 1
  VecX angles;           // test line angles
  VecX per_line;         // column means of w
  double mean = 0.0;
  double sd_across_lines = 0.0;  // sample standard deviation of per_line
};

/// Summaries of an indicator matrix (rows are contours, columns test lines).
CoverageReport make_report(double alpha, Eigen::MatrixXi w, VecX angles);

/// Coverage of each test contour by one shared region, or by one region per
/// contour (consumed in order).
CoverageReport coverage_report(std::span<const Polygon> contours, std::span<const CredibleRegion> regions,
                               const TestLineSet& lines);

}  // namespace gscm
