#pragma once

#include "gscm/representation.hpp"
#include "gscm/rng.hpp"

#include <Eigen/Cholesky>

namespace gscm {

/// Shortest angle between two directions, in [0, pi].
double angular_distance(double a, double b);

/// Sigma_ij = sigma_i sigma_j exp(-d(theta_i, theta_j) / kappa).
MatX exp_covariance(const VecX& sigma, double kappa, const VecX& theta);

/// Exponential correlation matrix (sigma = 1).
MatX exp_correlation(double kappa, const VecX& theta);

/// Cholesky factor of `cov`. When the plain factorization fails, adds
/// 1e-10 * max diagonal and escalates by 10x up to 1e-6 before throwing
/// ModelError.
Eigen::LLT<MatX> factorize_with_jitter(const MatX& cov);

struct GscmParams {
  LineSet lines;
  VecX mu;
  VecX sigma;
  double kappa = 1.0;
  double eta = 1e-4;

  GscmParams(LineSet lines_, VecX mu_, VecX sigma_, double kappa_, double eta_ = 1e-4);

  int p() const { return lines.size(); }
  MatX covariance() const { return exp_covariance(sigma, kappa, lines.angles()); }

  /// Checks sizes, positivity, the covariance factorization and that the
  /// normal mass on nonpositive lengths is below `tail_limit` on every line.
  void validate(double tail_limit = 0.01) const;
  /// Same parameters without the validation pass (used for posterior draws).
  static GscmParams unchecked(LineSet lines, VecX mu, VecX sigma, double kappa, double eta = 1e-4);

 private:
  struct Unchecked {};
  GscmParams(LineSet lines_, VecX mu_, VecX sigma_, double kappa_, double eta_, Unchecked);
};

/// Draws `k` length vectors (rows) from N(mu, Sigma), floored at eta. Row j
/// uses its own stream derived from (seed, j).
MatX sample_lengths(const GscmParams& params, int k, std::uint64_t seed);

/// One length vector from a prepared factor `chol` of Sigma.
VecX draw_lengths(const VecX& mu, const MatX& chol_lower, double eta, Rng& rng);

std::vector<Polygon> sample_contours(const GscmParams& params, int k, std::uint64_t seed);

struct ProbabilityGrid {
  GridGeometry geometry;
  MatX p;  // rows x cols, each entry a multiple of 1/samples
  int samples = 0;
};

/// Smallest grid of square cells of side `cell`, aligned to multiples of
/// `cell` from `anchor`, whose window contains `base` and every contour.
GridGeometry covering_grid(std::span<const Polygon> contours, double cell, const Bounds& base, Point anchor = {0, 0});

/// Fraction of contours whose rasterization marks each cell.
ProbabilityGrid gridded_probability(std::span<const Polygon> contours, const GridGeometry& geom);

struct CredibleRegion {
  double alpha = 0.0;
  BinaryGrid cells;
};

/// Cells with alpha/2 < p < 1 - alpha/2 (both strict).
CredibleRegion credible_region(const ProbabilityGrid& grid, double alpha);

}  // namespace gscm
