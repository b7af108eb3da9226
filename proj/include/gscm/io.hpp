#pragma once

#include "gscm/simlab.hpp"

#include <iosfwd>
#include <string>

namespace gscm::io {

/// Formats a value with 12 significant digits.
std::string format_number(double v);

/// Contour table with columns contour_id, vertex_index, x, y (any order).
/// The delimiter is taken from the header: comma, tab, semicolon or blanks.
/// Contours are returned by ascending id, vertices by ascending index.
std::vector<Polygon> read_contours(std::istream& in);
void write_contours(std::ostream& out, std::span<const Polygon> contours);

/// Header `rows cols origin_x origin_y cell`, then one line per row starting
/// with row 0 (the bottom row).
GridGeometry read_grid_header(std::istream& in);
BinaryGrid read_binary_grid(std::istream& in);
void write_binary_grid(std::ostream& out, const BinaryGrid& grid);

/// Same header followed by rows of reals (probabilities or concentrations).
MatX read_real_grid(std::istream& in, GridGeometry& geom);
void write_real_grid(std::ostream& out, const GridGeometry& geom, const MatX& values);

/// JSON object with keys p, C_x, C_y, theta, mu, sigma, kappa, eta.
GscmParams read_model(std::istream& in, double tail_limit = 0.05);
void write_model(std::ostream& out, const GscmParams& params);

/// Columns iter, kappa, mu_1..mu_p, sigma_1..sigma_p; `first_iter` labels
/// the first stored draw.
void write_posterior(std::ostream& out, const PosteriorSamples& samples, int first_iter);
PosteriorSamples read_posterior(std::istream& in);

/// Everything needed to turn posterior draws back into contours.
struct FitRecord {
  LineSet lines = LineSet::evenly({0.0, 0.0}, 3);
  Mode mode = Mode::exact;
  RescaleTransform transform;
  LineMask mask;
  double mean_area = 0.0;
  double eta = 1e-4;
  double accept_sigma = 0.0;
  double accept_kappa = 0.0;
};

FitRecord read_fit(std::istream& in);
void write_fit(std::ostream& out, const FitRecord& record);

/// `k, theta_k, coverage` with k counted from 1.
void write_line_coverage(std::ostream& out, const CoverageReport& report);
/// `alpha, mean, sd_across_lines`, one row per report.
void write_coverage_summary(std::ostream& out, std::span<const CoverageReport> reports);
/// `contour_id, mode, pct_differing_area, C_x, C_y`.
void write_star_report(std::ostream& out, std::span<const StarShapeRow> rows);
/// `run, p_hat, C_x, C_y, mean_area`.
void write_runs(std::ostream& out, const ExperimentResult& result);

/// Combined fit settings read from a JSON config; unknown keys are rejected.
struct FitSettings {
  FitConfig fit;
  int fixed_lines = 0;
  bool rescale = true;
  bool drop_constant_lines = false;
  double mu0 = 0.2;
  double lambda0 = 0.05;
  double beta_kappa = 8.0;
  double beta_sigma = 0.15;
  McmcConfig mcmc;
  double eta = 1e-4;
};

FitSettings parse_fit_settings(const std::string& json_text);
ExperimentConfig parse_experiment_config(const std::string& json_text);

std::string read_file(const std::string& path);

}  // namespace gscm::io
