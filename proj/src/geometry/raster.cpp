#include "gscm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gscm {

void GridGeometry::validate() const {
  if (rows <= 0 || cols <= 0) throw GeometryError("grid needs at least one row and column");
  if (!(cell > 0) || !std::isfinite(cell)) throw GeometryError("grid cell size must be positive");
  if (!std::isfinite(origin.x()) || !std::isfinite(origin.y())) throw GeometryError("grid origin must be finite");
}

std::size_t BinaryGrid::count() const { return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 1)); }

namespace {

// Integral over x of clamp(y(x), 0, 1) for the linear piece (x0, y0) -> (x1, y1),
// with y measured in row units relative to the row's bottom.
double clamped_integral(double x0, double y0, double x1, double y1) {
  double ts[4] = {0.0, 1.0, 0.0, 1.0};
  int nt = 2;
  if (y0 != y1) {
    for (double level : {0.0, 1.0}) {
      const double t = (level - y0) / (y1 - y0);
      if (t > 0.0 && t < 1.0) ts[nt++] = t;
    }
  }
  std::sort(ts, ts + nt);
  double sum = 0.0;
  for (int k = 0; k + 1 < nt; ++k) {
    const double ya = std::clamp(y0 + ts[k] * (y1 - y0), 0.0, 1.0);
    const double yb = std::clamp(y0 + ts[k + 1] * (y1 - y0), 0.0, 1.0);
    sum += 0.5 * (ya + yb) * (ts[k + 1] - ts[k]);
  }
  return sum * (x1 - x0);
}

}  // namespace

MatX cell_coverage(const Polygon& poly, const GridGeometry& geom) {
  geom.validate();
  const int rows = geom.rows;
  const int cols = geom.cols;
  // Work in cell units so each cell is the unit square.
  MatX area = MatX::Zero(rows, cols);
  MatX below = MatX::Zero(rows + 1, cols);
  const std::size_t n = poly.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point a = (poly[e] - geom.origin) / geom.cell;
    const Point b = (poly.vertex(e + 1) - geom.origin) / geom.cell;
    if (a.x() == b.x()) continue;
    const double xlo = std::max(std::min(a.x(), b.x()), 0.0);
    const double xhi = std::min(std::max(a.x(), b.x()), static_cast<double>(cols));
    if (xlo >= xhi) continue;
    const double slope = (b.y() - a.y()) / (b.x() - a.x());
    const double dir = b.x() > a.x() ? 1.0 : -1.0;
    const int jlo = static_cast<int>(std::floor(xlo));
    const int jhi = std::min(cols - 1, static_cast<int>(std::ceil(xhi)) - 1);
    for (int j = jlo; j <= jhi; ++j) {
      const double x0 = std::max(xlo, static_cast<double>(j));
      const double x1 = std::min(xhi, static_cast<double>(j + 1));
      if (x0 >= x1) continue;
      const double y0 = a.y() + slope * (x0 - a.x());
      const double y1 = a.y() + slope * (x1 - a.x());
      // Signed extent in traversal direction; the boundary integral is -clamp(y) dx.
      const double dx = dir * (x1 - x0);
      const double ymin = std::min(y0, y1);
      const double ymax = std::max(y0, y1);
      int ilo = static_cast<int>(std::floor(ymin));
      int ihi = static_cast<int>(std::floor(ymax));
      if (ihi >= rows) ihi = rows - 1;
      // Rows entirely below the piece receive the full -dx.
      if (ilo > 0) below(std::min(ilo, rows), j) += -dx;
      for (int i = std::max(ilo, 0); i <= ihi; ++i) {
        const double v = clamped_integral(x0, y0 - i, x1, y1 - i);
        area(i, j) += -(dir * v);
      }
    }
  }
  // below(k, j) applies to every row i < k.
  for (int j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (int i = rows; i >= 1; --i) {
      acc += below(i, j);
      area(i - 1, j) += acc;
    }
  }
  return area.cwiseMax(0.0).cwiseMin(1.0);
}

BinaryGrid contour_to_grid(const Polygon& poly, const GridGeometry& geom) {
  geom.validate();
  if (!geom.bounds().covers(poly.bounds())) throw WindowError("grid window does not cover the contour");
  const MatX frac = cell_coverage(poly, geom);
  BinaryGrid grid(geom);
  for (int i = 0; i < geom.rows; ++i) {
    for (int j = 0; j < geom.cols; ++j) grid.set(i, j, frac(i, j) > 0.5 + 1e-12);
  }
  return grid;
}

namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

// Labels 4-connected components of cells equal to `value`; returns the count.
int label_components(const BinaryGrid& grid, bool value, std::vector<int>& label, std::vector<int>& sizes) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  label.assign(static_cast<std::size_t>(rows) * cols, -1);
  sizes.clear();
  std::vector<int> stack;
  for (int s = 0; s < rows * cols; ++s) {
    if (label[s] >= 0 || grid(s / cols, s % cols) != value) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      ++sizes[id];
      const int i = c / cols;
      const int j = c % cols;
      for (int k = 0; k < 4; ++k) {
        const int ni = i + kDi[k];
        const int nj = j + kDj[k];
        if (ni < 0 || nj < 0 || ni >= rows || nj >= cols) continue;
        const int nc = ni * cols + nj;
        if (label[nc] >= 0 || grid(ni, nj) != value) continue;
        label[nc] = id;
        stack.push_back(nc);
      }
    }
  }
  return static_cast<int>(sizes.size());
}

}  // namespace

int count_regions(const BinaryGrid& grid) {
  std::vector<int> label, sizes;
  return label_components(grid, true, label, sizes);
}

BinaryGrid largest_region(const BinaryGrid& grid) {
  std::vector<int> label, sizes;
  const int n = label_components(grid, true, label, sizes);
  BinaryGrid out(grid.geometry());
  if (n == 0) return out;
  int best = 0;
  for (int k = 1; k < n; ++k) {
    if (sizes[k] > sizes[best]) best = k;
  }
  for (int s = 0; s < grid.rows() * grid.cols(); ++s) {
    if (label[s] == best) out.set(s / grid.cols(), s % grid.cols(), true);
  }
  return out;
}

BinaryGrid fill_holes(const BinaryGrid& grid) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  std::vector<int> label, sizes;
  label_components(grid, false, label, sizes);
  std::vector<char> reaches(sizes.size(), 0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (i != 0 && j != 0 && i != rows - 1 && j != cols - 1) continue;
      const int l = label[i * cols + j];
      if (l >= 0) reaches[l] = 1;
    }
  }
  BinaryGrid out = grid;
  for (int s = 0; s < rows * cols; ++s) {
    if (label[s] >= 0 && !reaches[label[s]]) out.set(s / cols, s % cols, true);
  }
  return out;
}

bool has_holes(const BinaryGrid& grid) { return fill_holes(grid).count() != grid.count(); }

Polygon grid_to_contour(const BinaryGrid& grid) {
  const int regions = count_regions(grid);
  if (regions == 0) throw GeometryError("grid has no true cells");
  if (regions > 1) throw GeometryError("grid has more than one region");
  if (has_holes(grid)) throw GeometryError("grid region has holes");

  const int rows = grid.rows();
  const int cols = grid.cols();
  const int stride = cols + 1;
  auto corner = [stride](int r, int c) { return r * stride + c; };
  std::vector<int> next(static_cast<std::size_t>(rows + 1) * stride, -1);
  auto link = [&](int from, int to) {
    if (next[from] >= 0) throw GeometryError("grid boundary touches itself at a corner");
    next[from] = to;
  };
  int start = -1;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!grid(i, j)) continue;
      if (start < 0) start = corner(i, j);
      if (!grid.at_or_false(i - 1, j)) link(corner(i, j), corner(i, j + 1));
      if (!grid.at_or_false(i, j + 1)) link(corner(i, j + 1), corner(i + 1, j + 1));
      if (!grid.at_or_false(i + 1, j)) link(corner(i + 1, j + 1), corner(i + 1, j));
      if (!grid.at_or_false(i, j - 1)) link(corner(i + 1, j), corner(i, j));
    }
  }

  std::vector<int> loop;
  int c = start;
  do {
    loop.push_back(c);
    c = next[c];
    if (c < 0) throw GeometryError("grid boundary is not closed");
  } while (c != start);

  const GridGeometry& g = grid.geometry();
  auto to_point = [&](int k) {
    return Point(g.origin.x() + (k % stride) * g.cell, g.origin.y() + (k / stride) * g.cell);
  };
  const std::size_t m = loop.size();
  std::vector<Point> pts;
  for (std::size_t k = 0; k < m; ++k) {
    const int prev = loop[(k + m - 1) % m];
    const int cur = loop[k];
    const int nxt = loop[(k + 1) % m];
    const int d1r = cur / stride - prev / stride, d1c = cur % stride - prev % stride;
    const int d2r = nxt / stride - cur / stride, d2c = nxt % stride - cur % stride;
    if (d1r != d2r || d1c != d2c) pts.push_back(to_point(cur));
  }
  return Polygon::trusted(std::move(pts));
}

}  // namespace gscm
