#include "gscm/model.hpp"

#include "gscm/parallel.hpp"

#include <cmath>

namespace gscm {

double angular_distance(double a, double b) {
  const double d = std::abs(std::fmod(a - b, kTwoPi));
  return std::min(d, kTwoPi - d);
}

MatX exp_correlation(double kappa, const VecX& theta) {
  if (!(kappa > 0) || !std::isfinite(kappa)) throw ModelError("kappa must be positive");
  const Index p = theta.size();
  MatX r(p, p);
  for (Index i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      const double v = std::exp(-angular_distance(theta[i], theta[j]) / kappa);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

MatX exp_covariance(const VecX& sigma, double kappa, const VecX& theta) {
  if (sigma.size() != theta.size()) throw ModelError("sigma and theta sizes differ");
  for (Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0) || !std::isfinite(sigma[i])) throw ModelError("sigma must be positive");
  }
  return sigma.asDiagonal() * exp_correlation(kappa, theta) * sigma.asDiagonal();
}

Eigen::LLT<MatX> factorize_with_jitter(const MatX& cov) {
  Eigen::LLT<MatX> llt(cov);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = cov.diagonal().maxCoeff();
  for (double jitter = 1e-10; jitter <= 1e-6 * (1 + 1e-9); jitter *= 10) {
    MatX c = cov;
    c.diagonal().array() += jitter * scale;
    llt.compute(c);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw ModelError("covariance matrix is not positive definite");
}

GscmParams::GscmParams(LineSet lines_, VecX mu_, VecX sigma_, double kappa_, double eta_)
    : GscmParams(std::move(lines_), std::move(mu_), std::move(sigma_), kappa_, eta_, Unchecked{}) {
  validate();
}

GscmParams::GscmParams(LineSet lines_, VecX mu_, VecX sigma_, double kappa_, double eta_, Unchecked)
    : lines(std::move(lines_)), mu(std::move(mu_)), sigma(std::move(sigma_)), kappa(kappa_), eta(eta_) {}

GscmParams GscmParams::unchecked(LineSet lines, VecX mu, VecX sigma, double kappa, double eta) {
  return GscmParams(std::move(lines), std::move(mu), std::move(sigma), kappa, eta, Unchecked{});
}

void GscmParams::validate(double tail_limit) const {
  if (mu.size() != p() || sigma.size() != p()) throw ModelError("mu and sigma must have one entry per line");
  if (!(eta > 0)) throw ModelError("eta must be positive");
  factorize_with_jitter(covariance());
  for (int i = 0; i < p(); ++i) {
    const double tail = 0.5 * std::erfc(mu[i] / (sigma[i] * std::sqrt(2.0)));
    if (!(tail < tail_limit)) throw ModelError("normal mass on nonpositive lengths too large on line " + std::to_string(i + 1));
  }
}

VecX draw_lengths(const VecX& mu, const MatX& chol_lower, double eta, Rng& rng) {
  VecX z(mu.size());
  for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  VecX y = mu + chol_lower.triangularView<Eigen::Lower>() * z;
  for (Index i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0)) y[i] = eta;
  }
  return y;
}

MatX sample_lengths(const GscmParams& params, int k, std::uint64_t seed) {
  if (k < 1) throw ModelError("sample count must be positive");
  const MatX chol = factorize_with_jitter(params.covariance()).matrixL();
  MatX out(k, params.p());
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t j) {
    Rng rng(seed, "contour", j);
    out.row(static_cast<Index>(j)) = draw_lengths(params.mu, chol, params.eta, rng).transpose();
  });
  return out;
}

std::vector<Polygon> sample_contours(const GscmParams& params, int k, std::uint64_t seed) {
  const MatX y = sample_lengths(params, k, seed);
  std::vector<Polygon> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out[j] = points_from_lengths(params.lines, y.row(j).transpose());
  return out;
}

GridGeometry covering_grid(std::span<const Polygon> contours, double cell, const Bounds& base, Point anchor) {
  if (!(cell > 0)) throw ModelError("cell size must be positive");
  Bounds box = base;
  for (const auto& c : contours) {
    box.lo = box.lo.cwiseMin(c.bounds().lo);
    box.hi = box.hi.cwiseMax(c.bounds().hi);
  }
  const Point lo = anchor + (((box.lo - anchor) / cell).array().floor() * cell).matrix();
  const Point hi = anchor + (((box.hi - anchor) / cell).array().ceil() * cell).matrix();
  GridGeometry g;
  g.origin = lo;
  g.cell = cell;
  g.cols = std::max(1, static_cast<int>(std::lround((hi.x() - lo.x()) / cell)));
  g.rows = std::max(1, static_cast<int>(std::lround((hi.y() - lo.y()) / cell)));
  return g;
}

ProbabilityGrid gridded_probability(std::span<const Polygon> contours, const GridGeometry& geom) {
  if (contours.empty()) throw ModelError("at least one contour is needed");
  geom.validate();
  const std::size_t chunks = std::min<std::size_t>(worker_count(), contours.size());
  std::vector<Eigen::MatrixXi> counts(chunks, Eigen::MatrixXi::Zero(geom.rows, geom.cols));
  parallel_for(chunks, [&](std::size_t c) {
    for (std::size_t k = c; k < contours.size(); k += chunks) {
      const BinaryGrid g = contour_to_grid(contours[k], geom);
      for (int i = 0; i < geom.rows; ++i) {
        for (int j = 0; j < geom.cols; ++j) counts[c](i, j) += g(i, j) ? 1 : 0;
      }
    }
  });
  Eigen::MatrixXi total = Eigen::MatrixXi::Zero(geom.rows, geom.cols);
  for (const auto& c : counts) total += c;
  ProbabilityGrid out;
  out.geometry = geom;
  out.samples = static_cast<int>(contours.size());
  out.p = total.cast<double>() / static_cast<double>(contours.size());
  return out;
}

CredibleRegion credible_region(const ProbabilityGrid& grid, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ModelError("alpha must lie in (0, 1)");
  CredibleRegion out{alpha, BinaryGrid(grid.geometry)};
  const double lo = alpha / 2 + 1e-12;
  const double hi = 1 - alpha / 2 - 1e-12;
  for (int i = 0; i < grid.geometry.rows; ++i) {
    for (int j = 0; j < grid.geometry.cols; ++j) {
      const double v = grid.p(i, j);
      out.cells.set(i, j, v > lo && v < hi);
    }
  }
  return out;
}

}  // namespace gscm
