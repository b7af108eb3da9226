#pragma once

#include "gscm/model.hpp"

#include <optional>

namespace gscm {

struct FitConfig {
  double delta = 0.02;
  double growth = 1.25;
  int p0 = 8;
  Mode mode = Mode::exact;
  int lattice = 25;
  double epsilon = 0.1;
  int max_lines = 1000;

  void validate() const;
};

/// Affine map taking the global coordinate ranges onto [eps, 1 - eps] per axis.
struct RescaleTransform {
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};
  double epsilon = 0.0;

  Point apply(const Point& p) const;
  Point invert(const Point& q) const;
  Polygon apply(const Polygon& poly) const;
  Polygon invert(const Polygon& poly) const;
};

struct Rescaled {
  std::vector<Polygon> contours;
  RescaleTransform transform;
};

/// Throws FitError for an empty list or a zero coordinate range.
Rescaled rescale(std::span<const Polygon> contours, double epsilon);

/// Candidate start points: a res x res lattice of cell centres over the
/// admissible region's bounding box, keeping points strictly inside the
/// kernel intersection (exact) or strictly inside every contour (under/over),
/// in row-major order from the bottom-left. In exact mode, when no lattice
/// point survives, the kernel intersection's vertex centroid is used instead.
/// Throws FitError when the admissible region is empty.
std::vector<Point> admissible_lattice(std::span<const Polygon> contours, Mode mode, int res);

/// Mean differing area over the contours for lines from `lines.center()`.
double mean_differing_area(std::span<const Polygon> contours, const LineSet& lines, Mode mode);

double mean_polygon_area(std::span<const Polygon> contours);

struct StartPointFit {
  Point center;
  double mean_area = 0.0;
};

/// Lattice candidate minimizing the mean differing area for angles `theta`;
/// ties keep the earliest candidate.
StartPointFit find_C_given_theta(std::span<const Polygon> contours, const VecX& theta, const FitConfig& config);
StartPointFit find_C_given_theta(std::span<const Polygon> contours, const VecX& theta, Mode mode,
                                 std::span<const Point> candidates);

struct LineFit {
  LineSet lines;
  double mean_area = 0.0;
  double bound = 0.0;               // delta * mean contour area
  std::vector<int> tried;           // line counts in schedule order
};

/// Next line count on the growth schedule: max(p + 1, ceil(a p)).
int next_line_count(int p, double growth);

/// Grows evenly spaced line sets from `center` until the mean differing area
/// drops below delta times the mean contour area. Throws FitError at the cap.
LineFit find_theta_given_C(std::span<const Polygon> contours, const Point& center, const FitConfig& config);

/// Alternates start-point optimization and line growth until the
/// differing-area constraint holds.
LineFit find_C_and_theta(std::span<const Polygon> contours, const FitConfig& config);

/// N x p matrix of lengths, row j for contour j.
MatX observed_lengths(std::span<const Polygon> contours, const LineSet& lines, Mode mode);

/// Lines whose observed lengths do not vary across contours. Modelled lines
/// are fitted; the others keep their constant observed length when
/// contours are generated.
struct LineMask {
  std::vector<int> modeled;
  VecX constant;  // length per line; only entries not in `modeled` are used

  static LineMask all(int p);
  static LineMask from_lengths(const MatX& y, double tol = 1e-12);
  bool trivial(int p) const { return static_cast<int>(modeled.size()) == p; }
  MatX select(const MatX& y) const;
  VecX select(const VecX& v) const;
};

struct Hyperparameters {
  VecX mu0;
  MatX lambda0;
  double beta_kappa = 8.0;
  VecX beta_sigma;

  /// mu0 = 0.2, Lambda0 = 0.05 I, beta_kappa = 8, beta_sigma = 0.15.
  static Hyperparameters simulation_defaults(int p);
  void validate(int p) const;
};

/// Log posterior density up to the normalizing constant of the data
/// (includes the uniform prior constants). Returns -infinity outside the
/// prior support.
double log_posterior(const MatX& y, const VecX& mu, const VecX& sigma, double kappa, const VecX& theta,
                     const Hyperparameters& hyper);

struct McmcConfig {
  int iterations = 10000;
  int burnin = 3000;
  std::uint64_t seed = 1;
  int adapt_interval = 50;
};

struct PosteriorSamples {
  VecX kappa;  // one entry per stored draw
  MatX mu;     // draws x p
  MatX sigma;  // draws x p
  double accept_mu = 1.0;
  double accept_sigma = 0.0;
  double accept_kappa = 0.0;
  std::uint64_t seed = 0;

  Index draws() const { return kappa.size(); }
};

/// Metropolis acceptance for a log target ratio and a uniform draw in [0, 1).
inline bool metropolis_accept(double log_ratio, double u) { return log_ratio >= 0 || u < std::exp(log_ratio); }

/// Metropolis-within-Gibbs: conjugate Gibbs update for mu, componentwise
/// random walk for sigma, scalar random walk for kappa. Proposal scales adapt
/// during burn-in and are frozen afterwards.
PosteriorSamples mcmc_fit(const MatX& y, const VecX& theta, const Hyperparameters& hyper, const McmcConfig& config);

/// K contours; contour k uses draw floor(k * draws / K) and its own stream.
std::vector<Polygon> posterior_predictive(const PosteriorSamples& samples, const LineSet& lines, int k, double eta,
                                          std::uint64_t seed, const LineMask* mask = nullptr);

struct StarShapeRow {
  int contour_id = 0;
  Mode mode = Mode::under;
  double pct_own_area = 0.0;
  double pct_mean_area = 0.0;
  Point center;
};

/// For each contour, the minimal differing area over its own candidate
/// lattice with p evenly spaced lines, as a percentage of the contour's area
/// and of the mean area across all contours.
std::vector<StarShapeRow> star_shapedness_report(std::span<const Polygon> contours, int p, Mode mode, int lattice = 25);

}  // namespace gscm
