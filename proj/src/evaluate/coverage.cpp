#include "gscm/evaluate.hpp"
#include "gscm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gscm {

TestLineSet::TestLineSet(Point center, int m) : center_(center), m_(m) {
  if (m < 3) throw ModelError("at least three test lines are needed");
  if (!center.allFinite()) throw ModelError("test line center must be finite");
}

namespace {

// Index range of cells whose closed extent contains coordinate u (in cell units).
std::pair<int, int> closed_range(double u, int n) {
  const int hi = std::min(n - 1, static_cast<int>(std::floor(u)));
  const int lo = std::max(0, static_cast<int>(std::ceil(u)) - 1);
  return {lo, hi};
}

bool closed_member(const BinaryGrid& region, const Point& pt) {
  const GridGeometry& g = region.geometry();
  const auto [c0, c1] = closed_range((pt.x() - g.origin.x()) / g.cell, g.cols);
  const auto [r0, r1] = closed_range((pt.y() - g.origin.y()) / g.cell, g.rows);
  for (int i = r0; i <= r1; ++i) {
    for (int j = c0; j <= c1; ++j) {
      if (region(i, j)) return true;
    }
  }
  return false;
}

// Positive distance to where the ray meets grid lines along one axis.
void axis_crossings(double o, double d, double origin, double cell, int n, double t_max, std::vector<double>& out) {
  if (d == 0) return;
  for (int k = 0; k <= n; ++k) {
    const double t = (origin + k * cell - o) / d;
    if (t > 0 && t < t_max) out.push_back(t);
  }
}

double exit_distance(double o, double d, double lo, double hi) {
  if (d > 0) return (hi - o) / d;
  if (d < 0) return (lo - o) / d;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<Interval> interval_on_line(const BinaryGrid& region, const Point& origin, double angle) {
  const GridGeometry& g = region.geometry();
  const Bounds box = g.bounds();
  if (!(origin.x() >= box.lo.x() && origin.x() <= box.hi.x() && origin.y() >= box.lo.y() && origin.y() <= box.hi.y())) {
    throw WindowError("test line origin lies outside the grid window");
  }
  const Point d(std::cos(angle), std::sin(angle));
  const double t_max = std::min(exit_distance(origin.x(), d.x(), box.lo.x(), box.hi.x()),
                                exit_distance(origin.y(), d.y(), box.lo.y(), box.hi.y()));
  std::vector<double> ts{0.0, t_max};
  axis_crossings(origin.x(), d.x(), g.origin.x(), g.cell, g.cols, t_max, ts);
  axis_crossings(origin.y(), d.y(), g.origin.y(), g.cell, g.rows, t_max, ts);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<Interval> pieces;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (closed_member(region, origin + ts[k] * d)) pieces.push_back({ts[k], ts[k]});
    if (k + 1 < ts.size() && closed_member(region, origin + 0.5 * (ts[k] + ts[k + 1]) * d)) {
      pieces.push_back({ts[k], ts[k + 1]});
    }
  }
  std::vector<Interval> out;
  for (const auto& p : pieces) {
    if (!out.empty() && p.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, p.hi);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

bool coverage_indicator(const Polygon& contour, const std::vector<Interval>& intervals, const Point& origin,
                        double angle) {
  for (const auto& hit : ray_polygon_intersections(origin, angle, contour)) {
    const bool inside = std::any_of(intervals.begin(), intervals.end(),
                                    [&](const Interval& iv) { return iv.contains(hit.distance); });
    if (!inside) return false;
  }
  return true;
}

bool coverage_indicator(const Polygon& contour, const BinaryGrid& region, const Point& origin, double angle) {
  return coverage_indicator(contour, interval_on_line(region, origin, angle), origin, angle);
}

CoverageReport coverage_report(std::span<const Polygon> contours, std::span<const CredibleRegion> regions,
                               const TestLineSet& lines) {
  if (contours.empty()) throw ModelError("no test contours");
  if (regions.size() != 1 && regions.size() != contours.size()) {
    throw ModelError("need one shared region or one region per test contour");
  }
  const int m = lines.size();
  const auto n = static_cast<Index>(contours.size());
  auto line_intervals = [&](const CredibleRegion& r) {
    std::vector<std::vector<Interval>> iv(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) iv[k] = interval_on_line(r.cells, lines.center(), lines.angle(k));
    return iv;
  };
  std::vector<std::vector<Interval>> shared;
  if (regions.size() == 1) shared = line_intervals(regions[0]);

  Eigen::MatrixXi w = Eigen::MatrixXi::Zero(n, m);
  VecX angles(m);
  for (int k = 0; k < m; ++k) angles[k] = lines.angle(k);
  parallel_for(contours.size(), [&](std::size_t i) {
    const auto own = regions.size() == 1 ? std::vector<std::vector<Interval>>{} : line_intervals(regions[i]);
    const auto& iv = regions.size() == 1 ? shared : own;
    for (int k = 0; k < m; ++k) {
      w(static_cast<Index>(i), k) = coverage_indicator(contours[i], iv[k], lines.center(), lines.angle(k)) ? 1 : 0;
    }
  });
  return make_report(regions[0].alpha, std::move(w), std::move(angles));
}

CoverageReport make_report(double alpha, Eigen::MatrixXi w, VecX angles) {
  if (w.rows() < 1 || w.cols() < 2 || angles.size() != w.cols()) throw ModelError("malformed coverage indicators");
  CoverageReport rep;
  rep.alpha = alpha;
  rep.w = std::move(w);
  rep.angles = std::move(angles);
  rep.per_line = rep.w.cast<double>().colwise().mean().transpose();
  rep.mean = rep.per_line.mean();
  rep.sd_across_lines = std::sqrt((rep.per_line.array() - rep.mean).square().sum() / (rep.per_line.size() - 1));
  return rep;
}

}  // namespace gscm
