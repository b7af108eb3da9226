#include "gscm/fit.hpp"
#include "gscm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gscm {

void FitConfig::validate() const {
  if (!(delta > 0 && delta < 1)) throw FitError("delta must lie in (0, 1)");
  if (!(growth > 1)) throw FitError("growth factor must exceed 1");
  if (p0 < 3) throw FitError("initial line count must exceed 2");
  if (!(epsilon >= 0 && epsilon < 0.5)) throw FitError("epsilon must lie in [0, 0.5)");
  if (lattice < 1) throw FitError("lattice resolution must be positive");
  if (max_lines < p0) throw FitError("line cap is below the initial line count");
}

Point RescaleTransform::apply(const Point& p) const {
  const Point span = hi - lo;
  return Point::Constant(epsilon) + (1 - 2 * epsilon) * (p - lo).cwiseQuotient(span);
}

Point RescaleTransform::invert(const Point& q) const {
  const Point span = hi - lo;
  return lo + (q - Point::Constant(epsilon)).cwiseProduct(span) / (1 - 2 * epsilon);
}

namespace {

template <typename Fn>
Polygon map_polygon(const Polygon& poly, Fn&& fn) {
  std::vector<Point> pts;
  pts.reserve(poly.size());
  for (const auto& v : poly.vertices()) pts.push_back(fn(v));
  return Polygon::trusted(std::move(pts));
}

}  // namespace

// Per-axis positive scaling keeps orientation and simplicity.
Polygon RescaleTransform::apply(const Polygon& poly) const {
  return map_polygon(poly, [this](const Point& p) { return apply(p); });
}

Polygon RescaleTransform::invert(const Polygon& poly) const {
  return map_polygon(poly, [this](const Point& p) { return invert(p); });
}

Rescaled rescale(std::span<const Polygon> contours, double epsilon) {
  if (contours.empty()) throw FitError("no contours to rescale");
  if (!(epsilon >= 0 && epsilon < 0.5)) throw FitError("epsilon must lie in [0, 0.5)");
  Bounds box = contours.front().bounds();
  for (const auto& c : contours) {
    box.lo = box.lo.cwiseMin(c.bounds().lo);
    box.hi = box.hi.cwiseMax(c.bounds().hi);
  }
  if (!(box.hi.x() > box.lo.x()) || !(box.hi.y() > box.lo.y())) throw FitError("zero coordinate range");
  Rescaled out;
  out.transform = {box.lo, box.hi, epsilon};
  out.contours.reserve(contours.size());
  for (const auto& c : contours) out.contours.push_back(out.transform.apply(c));
  return out;
}

double mean_polygon_area(std::span<const Polygon> contours) {
  if (contours.empty()) throw FitError("no contours");
  double total = 0;
  for (const auto& c : contours) total += c.area();
  return total / static_cast<double>(contours.size());
}

std::vector<Point> admissible_lattice(std::span<const Polygon> contours, Mode mode, int res) {
  if (contours.empty()) throw FitError("no contours");
  if (res < 1) throw FitError("lattice resolution must be positive");
  auto lattice = [res](const Bounds& box, auto&& keep) {
    std::vector<Point> pts;
    const Point step = (box.hi - box.lo) / res;
    for (int i = 0; i < res; ++i) {
      for (int j = 0; j < res; ++j) {
        const Point c = box.lo + Point((j + 0.5) * step.x(), (i + 0.5) * step.y());
        if (keep(c)) pts.push_back(c);
      }
    }
    return pts;
  };

  if (mode == Mode::exact) {
    const auto ker = kernel_intersection(contours);
    if (!ker) throw FitError("the contours share no kernel point");
    auto pts = lattice(ker->bounds(), [&](const Point& c) { return in_kernel(c, *ker); });
    if (pts.empty()) {
      Point centroid = Point::Zero();
      for (const auto& v : ker->vertices()) centroid += v;
      pts.push_back(centroid / static_cast<double>(ker->size()));
    }
    return pts;
  }

  auto inside_all = [&](const Point& c) {
    for (const auto& s : contours) {
      if (point_in_polygon(c, s) != Location::inside) return false;
    }
    return true;
  };
  Bounds box = contours.front().bounds();
  for (const auto& s : contours) {
    box.lo = box.lo.cwiseMax(s.bounds().lo);
    box.hi = box.hi.cwiseMin(s.bounds().hi);
  }
  if (!(box.hi.x() > box.lo.x()) || !(box.hi.y() > box.lo.y())) throw FitError("the contours do not overlap");
  // Tighten the box to the sampled extent of the common interior.
  constexpr int kProbe = 100;
  const Point fine = (box.hi - box.lo) / kProbe;
  Bounds tight{Point::Constant(std::numeric_limits<double>::infinity()),
               Point::Constant(-std::numeric_limits<double>::infinity())};
  for (int i = 0; i < kProbe; ++i) {
    for (int j = 0; j < kProbe; ++j) {
      const Point c = box.lo + Point((j + 0.5) * fine.x(), (i + 0.5) * fine.y());
      if (!inside_all(c)) continue;
      tight.lo = tight.lo.cwiseMin(c - 0.5 * fine);
      tight.hi = tight.hi.cwiseMax(c + 0.5 * fine);
    }
  }
  if (tight.hi.x() > tight.lo.x()) box = tight;
  auto pts = lattice(box, inside_all);
  if (pts.empty()) throw FitError("no candidate start point lies inside every contour");
  return pts;
}

double mean_differing_area(std::span<const Polygon> contours, const LineSet& lines, Mode mode) {
  double total = 0;
  for (const auto& c : contours) total += differing_area(c, lines, mode);
  return total / static_cast<double>(contours.size());
}

StartPointFit find_C_given_theta(std::span<const Polygon> contours, const VecX& theta, Mode mode,
                                 std::span<const Point> candidates) {
  if (candidates.empty()) throw FitError("no candidate start points");
  const LineSet base(candidates.front(), theta);
  std::vector<double> score(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t k) {
    score[k] = mean_differing_area(contours, base.with_center(candidates[k]), mode);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < score.size(); ++k) {
    if (score[k] < score[best]) best = k;
  }
  return {candidates[best], score[best]};
}

StartPointFit find_C_given_theta(std::span<const Polygon> contours, const VecX& theta, const FitConfig& config) {
  config.validate();
  const auto candidates = admissible_lattice(contours, config.mode, config.lattice);
  return find_C_given_theta(contours, theta, config.mode, candidates);
}

int next_line_count(int p, double growth) {
  return std::max(p + 1, static_cast<int>(std::ceil(growth * p - 1e-9)));
}

LineFit find_theta_given_C(std::span<const Polygon> contours, const Point& center, const FitConfig& config) {
  config.validate();
  const double bound = config.delta * mean_polygon_area(contours);
  std::vector<int> tried;
  for (int p = config.p0; p <= config.max_lines; p = next_line_count(p, config.growth)) {
    const LineSet lines = LineSet::evenly(center, p);
    tried.push_back(p);
    const double area = mean_differing_area(contours, lines, config.mode);
    if (area < bound) return {lines, area, bound, tried};
  }
  throw FitError("line cap reached before the differing-area constraint was met");
}

LineFit find_C_and_theta(std::span<const Polygon> contours, const FitConfig& config) {
  config.validate();
  const double bound = config.delta * mean_polygon_area(contours);
  const auto candidates = admissible_lattice(contours, config.mode, config.lattice);
  std::vector<int> tried;
  for (int p = config.p0; p <= config.max_lines; p = next_line_count(p, config.growth)) {
    const LineSet even = LineSet::evenly(candidates.front(), p);
    const StartPointFit best = find_C_given_theta(contours, even.angles(), config.mode, candidates);
    tried.push_back(p);
    if (best.mean_area < bound) return {even.with_center(best.center), best.mean_area, bound, tried};
  }
  throw FitError("line cap reached before the differing-area constraint was met");
}

MatX observed_lengths(std::span<const Polygon> contours, const LineSet& lines, Mode mode) {
  MatX y(static_cast<Index>(contours.size()), lines.size());
  for (std::size_t j = 0; j < contours.size(); ++j) {
    y.row(static_cast<Index>(j)) = star_lengths(contours[j], lines, mode).transpose();
  }
  return y;
}

LineMask LineMask::all(int p) {
  LineMask m;
  m.modeled.resize(p);
  for (int i = 0; i < p; ++i) m.modeled[i] = i;
  m.constant = VecX::Zero(p);
  return m;
}

LineMask LineMask::from_lengths(const MatX& y, double tol) {
  LineMask m;
  m.constant = VecX::Zero(y.cols());
  for (Index i = 0; i < y.cols(); ++i) {
    const double lo = y.col(i).minCoeff();
    const double hi = y.col(i).maxCoeff();
    if (hi - lo > tol * std::max(1.0, std::abs(hi))) {
      m.modeled.push_back(static_cast<int>(i));
    } else {
      m.constant[i] = y(0, i);
    }
  }
  if (m.modeled.size() < 1) throw ModelError("no line has varying lengths");
  return m;
}

MatX LineMask::select(const MatX& y) const {
  MatX out(y.rows(), static_cast<Index>(modeled.size()));
  for (std::size_t k = 0; k < modeled.size(); ++k) out.col(static_cast<Index>(k)) = y.col(modeled[k]);
  return out;
}

VecX LineMask::select(const VecX& v) const {
  VecX out(static_cast<Index>(modeled.size()));
  for (std::size_t k = 0; k < modeled.size(); ++k) out[static_cast<Index>(k)] = v[modeled[k]];
  return out;
}

std::vector<StarShapeRow> star_shapedness_report(std::span<const Polygon> contours, int p, Mode mode, int lattice) {
  if (contours.empty()) throw FitError("no contours");
  if (p < 3) throw ModelError("a line set needs more than two lines");
  const double mean_area = mean_polygon_area(contours);
  const VecX theta = LineSet::evenly({0, 0}, p).angles();
  std::vector<StarShapeRow> rows;
  for (std::size_t i = 0; i < contours.size(); ++i) {
    const std::span<const Polygon> one(&contours[i], 1);
    const auto candidates = admissible_lattice(one, mode, lattice);
    const StartPointFit best = find_C_given_theta(one, theta, mode, candidates);
    rows.push_back({static_cast<int>(i), mode, 100.0 * best.mean_area / contours[i].area(),
                    100.0 * best.mean_area / mean_area, best.center});
  }
  return rows;
}

}  // namespace gscm
