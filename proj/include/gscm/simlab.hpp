#pragma once

#include "gscm/evaluate.hpp"
#include "gscm/fit.hpp"

#include <optional>
#include <string>

namespace gscm {

/// Parameters of the built-in simulation shapes "A", "B" and "C"
/// (p = 50, kappa = 2, C = (0.5, 0.5)). Throws ModelError for other names.
GscmParams builtin_shape(const std::string& name);

/// Non-star sections attached to a star polygon: a strip at a radial offset
/// outside the boundary, doubling back over `loops` lines and joined to the
/// polygon by a connector between two consecutive lines.
struct AppendSpec {
  int loops_lo = 0;  // loop count is a uniform integer in [loops_lo, loops_hi]
  int loops_hi = 1;
  double offset_lo = 0.02;
  double offset_hi = 0.06;
  double width_lo = 0.02;
  double width_hi = 0.04;
  bool fixed_location = false;
  int fixed_index = -1;  // start line when fixed; -1 means p / 4
  int max_retries = 100;
  Bounds window{{0.0, 0.0}, {1.0, 1.0}};

  void validate() const;
};

/// Deterministic construction for given draws; `start` indexes the line at
/// which the strip ends farthest from the connector.
Polygon append_strip(const LineSet& lines, const VecX& lengths, int start, int loops, double offset, double width);

/// Draws loop count, location, offset and width; a zero loop count returns
/// the star polygon unchanged. Throws GeometryError when every retry leaves
/// the window.
Polygon append_section(const LineSet& lines, const VecX& lengths, const AppendSpec& spec, Rng& rng);

struct ExperimentConfig {
  std::string shape = "A";
  std::optional<double> kappa;  // overrides the shape's kappa
  int n_train = 20;
  int runs = 10;
  double delta = 0.02;
  int fixed_lines = 0;  // > 0: use this many evenly spaced lines and fit only C
  Mode mode = Mode::exact;
  double growth = 1.05;
  int lattice = 25;
  int test_lines = 100;
  int test_contours = 1;  // fresh true contours per run
  std::vector<double> alphas{0.2, 0.1, 0.05};
  int iterations = 10000;
  int burnin = 3000;
  double mu0 = 0.2;
  double lambda0 = 0.05;
  double beta_kappa = 8.0;
  double beta_sigma = 0.15;
  int predictive = 100;
  int grid = 128;        // cells per unit length
  bool oracle = false;   // credible regions from the true model instead of a fit
  int oracle_samples = 2000;
  bool selection_only = false;  // stop after choosing C and theta
  std::optional<AppendSpec> append;
  std::uint64_t seed = 1;

  /// Desk-scale defaults: 10 runs, 10 000 iterations, 3 000 burn-in.
  static ExperimentConfig desk();
  /// Full protocol: 40 runs, 50 000 iterations, 15 000 burn-in.
  static ExperimentConfig full();
  void validate() const;
};

struct RunResult {
  int run = 0;
  int p_hat = 0;
  Point c_hat{0.0, 0.0};
  double mean_area = 0.0;
  std::vector<Eigen::MatrixXi> w;  // per alpha: test contours x test lines
  double accept_sigma = 0.0;
  double accept_kappa = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;
  std::vector<CoverageReport> coverage;  // per alpha, rows pooled over runs
  double mean_p_hat = 0.0;
  double sd_p_hat = 0.0;
};

/// One evaluation run; deterministic in (config.seed, run).
RunResult run_once(const ExperimentConfig& config, int run);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Builds the pooled coverage summaries from per-run indicators.
void summarize(ExperimentResult& result);

struct CrossValidationConfig {
  Mode mode = Mode::over;
  double delta = 0.02;
  double growth = 1.05;
  int lattice = 25;
  double epsilon = 0.1;
  int test_lines = 100;
  std::vector<double> alphas{0.2, 0.1, 0.05};
  int iterations = 10000;
  int burnin = 3000;
  int predictive = 100;
  int grid = 128;
  bool drop_constant_lines = true;
  std::uint64_t seed = 1;
};

struct FoldResult {
  int held_out = 0;
  int p_hat = 0;
  Point c_hat{0.0, 0.0};  // in rescaled coordinates
  std::vector<Eigen::MatrixXi> w;  // per alpha: 1 x test lines
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  std::vector<CoverageReport> coverage;  // per alpha, one row per fold
};

/// Leave-one-out: fit to all contours but one, score the held-out contour on
/// test lines from the fitted start point.
CrossValidationResult leave_one_out(std::span<const Polygon> contours, const CrossValidationConfig& config);

/// Concentration fields: fractional cell coverage of contours drawn from
/// `params`, plus uniform noise of amplitude `noise` clamped to [0, 1].
std::vector<MatX> synthetic_rasters(const GscmParams& params, int count, const GridGeometry& geom, double noise,
                                    std::uint64_t seed);

/// Thresholds a concentration field, keeps the largest region, fills holes
/// and traces its outline. Throws GeometryError when nothing passes.
Polygon contour_from_concentration(const MatX& conc, const GridGeometry& geom, double threshold = 0.15);

}  // namespace gscm
