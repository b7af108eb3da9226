#include "gscm/io.hpp"
#include "gscm/parallel.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gscm;

namespace {

template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write(out);
  if (!out) throw ParseError("write to '" + path + "' failed");
}

std::vector<Polygon> load_contours(const std::string& path) {
  std::istringstream in(io::read_file(path));
  return io::read_contours(in);
}

template <typename T, typename F>
T load(const std::string& path, F&& read) {
  std::istringstream in(io::read_file(path));
  return read(in);
}

struct IngestArgs {
  std::string raster, out;
  double threshold = 0.15;
};

void cmd_ingest(const IngestArgs& a) {
  std::istringstream in(io::read_file(a.raster));
  GridGeometry geom;
  const MatX conc = io::read_real_grid(in, geom);
  if (conc.minCoeff() < 0 || conc.maxCoeff() > 1) throw ParseError("concentrations must lie in [0, 1]");
  const Polygon contour = contour_from_concentration(conc, geom, a.threshold);
  with_output(a.out, [&](std::ostream& o) { io::write_contours(o, std::span<const Polygon>(&contour, 1)); });
}

struct FitArgs {
  std::string contours, config, fit_out, posterior_out;
  std::uint64_t seed = 0;
  std::optional<double> delta;
  std::optional<std::string> mode;
  std::optional<int> fixed_lines, iterations, burnin;
};

void cmd_fit(const FitArgs& a) {
  io::FitSettings s = a.config.empty() ? io::FitSettings{} : io::parse_fit_settings(io::read_file(a.config));
  if (a.delta) s.fit.delta = *a.delta;
  if (a.mode) s.fit.mode = parse_mode(*a.mode);
  if (a.fixed_lines) s.fixed_lines = *a.fixed_lines;
  if (a.iterations) s.mcmc.iterations = *a.iterations;
  if (a.burnin) s.mcmc.burnin = *a.burnin;
  s.fit.validate();
  s.mcmc.seed = derive_seed(a.seed, "mcmc");

  const auto raw = load_contours(a.contours);
  if (raw.size() < 2) throw FitError("fitting requires at least two contours");
  io::FitRecord rec;
  std::vector<Polygon> contours = raw;
  if (s.rescale) {
    Rescaled r = rescale(raw, s.fit.epsilon);
    contours = std::move(r.contours);
    rec.transform = r.transform;
  }
  rec.mode = s.fit.mode;
  if (s.fixed_lines > 0) {
    const VecX theta = LineSet::evenly({0, 0}, s.fixed_lines).angles();
    const StartPointFit sp = find_C_given_theta(contours, theta, s.fit);
    rec.lines = LineSet(sp.center, theta);
    rec.mean_area = sp.mean_area;
  } else {
    const LineFit lf = find_C_and_theta(contours, s.fit);
    rec.lines = lf.lines;
    rec.mean_area = lf.mean_area;
  }
  const MatX y = observed_lengths(contours, rec.lines, s.fit.mode);
  rec.mask = s.drop_constant_lines ? LineMask::from_lengths(y) : LineMask::all(rec.lines.size());
  const int q = static_cast<int>(rec.mask.modeled.size());
  Hyperparameters hyper;
  hyper.mu0 = VecX::Constant(q, s.mu0);
  hyper.lambda0 = s.lambda0 * MatX::Identity(q, q);
  hyper.beta_kappa = s.beta_kappa;
  hyper.beta_sigma = VecX::Constant(q, s.beta_sigma);
  const PosteriorSamples post = mcmc_fit(rec.mask.select(y), rec.mask.select(rec.lines.angles()), hyper, s.mcmc);
  rec.eta = s.eta;
  rec.accept_sigma = post.accept_sigma;
  rec.accept_kappa = post.accept_kappa;
  with_output(a.fit_out, [&](std::ostream& o) { io::write_fit(o, rec); });
  with_output(a.posterior_out, [&](std::ostream& o) { io::write_posterior(o, post, s.mcmc.burnin + 1); });
}

struct SampleArgs {
  std::string model, shape, fit, posterior, out;
  int count = 100;
  std::uint64_t seed = 0;
  bool rescaled = false;
};

void cmd_sample(const SampleArgs& a) {
  std::vector<Polygon> contours;
  if (!a.fit.empty()) {
    if (a.posterior.empty()) throw ParseError("--fit needs --posterior");
    const auto rec = load<io::FitRecord>(a.fit, [](std::istream& in) { return io::read_fit(in); });
    const auto post = load<PosteriorSamples>(a.posterior, [](std::istream& in) { return io::read_posterior(in); });
    if (post.mu.cols() != static_cast<Index>(rec.mask.modeled.size())) {
      throw ModelError("posterior dimension does not match the fit record");
    }
    contours = posterior_predictive(post, rec.lines, a.count, rec.eta, derive_seed(a.seed, "predictive"),
                                    rec.mask.trivial(rec.lines.size()) ? nullptr : &rec.mask);
    if (!a.rescaled) {
      for (auto& c : contours) c = rec.transform.invert(c);
    }
  } else {
    const GscmParams params =
        !a.model.empty() ? load<GscmParams>(a.model, [](std::istream& in) { return io::read_model(in); })
                         : builtin_shape(a.shape.empty() ? "A" : a.shape);
    contours = sample_contours(params, a.count, derive_seed(a.seed, "sample"));
  }
  with_output(a.out, [&](std::ostream& o) { io::write_contours(o, contours); });
}

struct ProbgridArgs {
  std::string contours, out;
  double cell = 1.0 / 128;
  std::vector<double> window{0, 0, 1, 1};
};

void cmd_probgrid(const ProbgridArgs& a) {
  const auto contours = load_contours(a.contours);
  const Bounds base{{a.window[0], a.window[1]}, {a.window[2], a.window[3]}};
  if (!(base.hi.x() > base.lo.x() && base.hi.y() > base.lo.y())) throw ParseError("window must have positive extent");
  const GridGeometry geom = covering_grid(contours, a.cell, base, base.lo);
  const ProbabilityGrid pg = gridded_probability(contours, geom);
  with_output(a.out, [&](std::ostream& o) { io::write_real_grid(o, pg.geometry, pg.p); });
}

struct CredibleArgs {
  std::string grid, out;
  double alpha = 0.1;
};

void cmd_credible(const CredibleArgs& a) {
  std::istringstream in(io::read_file(a.grid));
  ProbabilityGrid pg;
  pg.p = io::read_real_grid(in, pg.geometry);
  if (pg.p.minCoeff() < 0 || pg.p.maxCoeff() > 1) throw ParseError("probabilities must lie in [0, 1]");
  const CredibleRegion region = credible_region(pg, a.alpha);
  with_output(a.out, [&](std::ostream& o) { io::write_binary_grid(o, region.cells); });
}

struct CoverageArgs {
  std::string contours, region, per_line, summary;
  double alpha = 0.1;
  std::vector<double> center{0.5, 0.5};
  int lines = 100;
};

void cmd_coverage(const CoverageArgs& a) {
  const auto contours = load_contours(a.contours);
  const BinaryGrid cells = load<BinaryGrid>(a.region, [](std::istream& in) { return io::read_binary_grid(in); });
  const std::vector<CredibleRegion> regions{{a.alpha, cells}};
  const CoverageReport rep = coverage_report(contours, regions, TestLineSet({a.center[0], a.center[1]}, a.lines));
  if (!a.per_line.empty()) with_output(a.per_line, [&](std::ostream& o) { io::write_line_coverage(o, rep); });
  with_output(a.summary, [&](std::ostream& o) { io::write_coverage_summary(o, std::span(&rep, 1)); });
}

struct ExperimentArgs {
  std::string config, out, runs_out, per_line_prefix, loo;
  std::uint64_t seed = 0;
  std::optional<int> runs, iterations, burnin;
  std::optional<std::string> mode;
  std::optional<double> delta;
};

void write_per_line(const std::string& prefix, std::span<const CoverageReport> reports) {
  if (prefix.empty()) return;
  for (const auto& r : reports) {
    with_output(prefix + "_alpha" + io::format_number(r.alpha) + ".csv",
                [&](std::ostream& o) { io::write_line_coverage(o, r); });
  }
}

void cmd_experiment(const ExperimentArgs& a) {
  if (!a.loo.empty()) {
    const auto contours = load_contours(a.loo);
    CrossValidationConfig cv;
    if (a.mode) cv.mode = parse_mode(*a.mode);
    if (a.delta) cv.delta = *a.delta;
    if (a.iterations) cv.iterations = *a.iterations;
    if (a.burnin) cv.burnin = *a.burnin;
    cv.seed = a.seed;
    const CrossValidationResult res = leave_one_out(contours, cv);
    with_output(a.out, [&](std::ostream& o) { io::write_coverage_summary(o, res.coverage); });
    write_per_line(a.per_line_prefix, res.coverage);
    return;
  }
  ExperimentConfig c = a.config.empty() ? ExperimentConfig::desk() : io::parse_experiment_config(io::read_file(a.config));
  c.seed = a.seed;
  if (a.runs) c.runs = *a.runs;
  if (a.iterations) c.iterations = *a.iterations;
  if (a.burnin) c.burnin = *a.burnin;
  if (a.mode) c.mode = parse_mode(*a.mode);
  if (a.delta) c.delta = *a.delta;
  const ExperimentResult res = run_experiment(c);
  with_output(a.out, [&](std::ostream& o) { io::write_coverage_summary(o, res.coverage); });
  if (!a.runs_out.empty()) with_output(a.runs_out, [&](std::ostream& o) { io::write_runs(o, res); });
  write_per_line(a.per_line_prefix, res.coverage);
}

struct StarArgs {
  std::string contours, out, mode = "under";
  int lines = 50;
  int lattice = 25;
};

void cmd_report_starshape(const StarArgs& a) {
  const auto contours = load_contours(a.contours);
  const auto rows = star_shapedness_report(contours, a.lines, parse_mode(a.mode), a.lattice);
  with_output(a.out, [&](std::ostream& o) { io::write_star_report(o, rows); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian star-shaped contour models: fitting, sampling and coverage evaluation"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  IngestArgs ingest;
  auto* sub_ingest = app.add_subcommand("ingest", "Trace the largest region of a concentration raster");
  sub_ingest->add_option("--raster", ingest.raster, "Concentration grid file")->required()->check(CLI::ExistingFile);
  sub_ingest->add_option("--threshold", ingest.threshold, "Minimum concentration counted as inside");
  sub_ingest->add_option("--out,-o", ingest.out, "Contour file (default stdout)");

  FitArgs fit;
  auto* sub_fit = app.add_subcommand("fit", "Choose C and theta, then sample the posterior");
  sub_fit->add_option("--contours", fit.contours, "Training contour file")->required()->check(CLI::ExistingFile);
  sub_fit->add_option("--config", fit.config, "JSON fit settings")->check(CLI::ExistingFile);
  sub_fit->add_option("--seed", fit.seed, "Random seed")->required();
  sub_fit->add_option("--fit-out", fit.fit_out, "Fit record (JSON)")->required();
  sub_fit->add_option("--posterior-out", fit.posterior_out, "Posterior draws (CSV)")->required();
  sub_fit->add_option("--delta", fit.delta, "Differing-area bound as a fraction of mean area");
  sub_fit->add_option("--mode", fit.mode, "exact, under or over");
  sub_fit->add_option("--fixed-lines", fit.fixed_lines, "Use this many evenly spaced lines");
  sub_fit->add_option("--iterations", fit.iterations, "MCMC iterations");
  sub_fit->add_option("--burnin", fit.burnin, "MCMC burn-in");

  SampleArgs sample;
  auto* sub_sample = app.add_subcommand("sample", "Draw contours from a model, a built-in shape or a posterior");
  sub_sample->add_option("--model", sample.model, "Model parameter file (JSON)")->check(CLI::ExistingFile);
  sub_sample->add_option("--shape", sample.shape, "Built-in shape A, B or C");
  sub_sample->add_option("--fit", sample.fit, "Fit record from 'fit'")->check(CLI::ExistingFile);
  sub_sample->add_option("--posterior", sample.posterior, "Posterior draws from 'fit'")->check(CLI::ExistingFile);
  sub_sample->add_flag("--rescaled", sample.rescaled, "Keep posterior samples in the fitted unit-square frame");
  sub_sample->add_option("--count,-n", sample.count, "Number of contours")->check(CLI::PositiveNumber);
  sub_sample->add_option("--seed", sample.seed, "Random seed")->required();
  sub_sample->add_option("--out,-o", sample.out, "Contour file (default stdout)");

  ProbgridArgs probgrid;
  auto* sub_prob = app.add_subcommand("probgrid", "Fraction of contours covering each grid cell");
  sub_prob->add_option("--contours", probgrid.contours, "Contour file")->required()->check(CLI::ExistingFile);
  sub_prob->add_option("--cell", probgrid.cell, "Cell side length")->check(CLI::PositiveNumber);
  sub_prob->add_option("--window", probgrid.window, "Minimum window lo_x lo_y hi_x hi_y")->expected(4);
  sub_prob->add_option("--out,-o", probgrid.out, "Probability grid file (default stdout)");

  CredibleArgs credible;
  auto* sub_cred = app.add_subcommand("credible", "Cells strictly between alpha/2 and 1 - alpha/2");
  sub_cred->add_option("--grid", credible.grid, "Probability grid file")->required()->check(CLI::ExistingFile);
  sub_cred->add_option("--alpha", credible.alpha, "Level in (0, 1)")->required();
  sub_cred->add_option("--out,-o", credible.out, "Binary grid file (default stdout)");

  CoverageArgs coverage;
  auto* sub_cov = app.add_subcommand("coverage", "Per-line coverage of contours by a credible region");
  sub_cov->add_option("--contours", coverage.contours, "Test contour file")->required()->check(CLI::ExistingFile);
  sub_cov->add_option("--region", coverage.region, "Credible region grid")->required()->check(CLI::ExistingFile);
  sub_cov->add_option("--alpha", coverage.alpha, "Level the region was built at");
  sub_cov->add_option("--center", coverage.center, "Test line origin x y")->expected(2);
  sub_cov->add_option("--lines", coverage.lines, "Number of test lines")->check(CLI::Range(3, 100000));
  sub_cov->add_option("--per-line", coverage.per_line, "Per-line coverage file");
  sub_cov->add_option("--out,-o", coverage.summary, "Summary file (default stdout)");

  ExperimentArgs exp;
  auto* sub_exp = app.add_subcommand("experiment", "Simulation study or leave-one-out cross-validation");
  sub_exp->add_option("--config", exp.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub_exp->add_option("--loo", exp.loo, "Cross-validate these contours instead")->check(CLI::ExistingFile);
  sub_exp->add_option("--seed", exp.seed, "Random seed")->required();
  sub_exp->add_option("--runs", exp.runs, "Evaluation runs");
  sub_exp->add_option("--iterations", exp.iterations, "MCMC iterations");
  sub_exp->add_option("--burnin", exp.burnin, "MCMC burn-in");
  sub_exp->add_option("--mode", exp.mode, "exact, under or over");
  sub_exp->add_option("--delta", exp.delta, "Differing-area bound");
  sub_exp->add_option("--runs-out", exp.runs_out, "Per-run p_hat table");
  sub_exp->add_option("--per-line", exp.per_line_prefix, "Prefix for per-line coverage files");
  sub_exp->add_option("--out,-o", exp.out, "Coverage summary (default stdout)");

  StarArgs star;
  auto* sub_star = app.add_subcommand("report-starshape", "Differing area of each contour's best star representation");
  sub_star->add_option("--contours", star.contours, "Contour file")->required()->check(CLI::ExistingFile);
  sub_star->add_option("--lines", star.lines, "Evenly spaced line count")->check(CLI::Range(3, 100000));
  sub_star->add_option("--mode", star.mode, "under or over");
  sub_star->add_option("--lattice", star.lattice, "Candidate lattice resolution")->check(CLI::PositiveNumber);
  sub_star->add_option("--out,-o", star.out, "Report file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  thread_limit() = threads;

  try {
    if (*sub_ingest) cmd_ingest(ingest);
    else if (*sub_fit) cmd_fit(fit);
    else if (*sub_sample) cmd_sample(sample);
    else if (*sub_prob) cmd_probgrid(probgrid);
    else if (*sub_cred) cmd_credible(credible);
    else if (*sub_cov) cmd_coverage(coverage);
    else if (*sub_exp) cmd_experiment(exp);
    else if (*sub_star) cmd_report_starshape(star);
  } catch (const std::exception& e) {
    std::cerr << "gscm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
