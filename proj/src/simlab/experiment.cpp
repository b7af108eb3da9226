#include "gscm/simlab.hpp"
#include "gscm/parallel.hpp"

#include <cmath>

namespace gscm {

ExperimentConfig ExperimentConfig::desk() { return {}; }

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig c;
  c.runs = 40;
  c.iterations = 50000;
  c.burnin = 15000;
  return c;
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ModelError("at least one evaluation run is needed");
  if (n_train < 2) throw FitError("fitting requires at least two training contours");
  if (fixed_lines != 0 && fixed_lines < 3) throw ModelError("a fixed line count must exceed 2");
  if (fixed_lines == 0 && !(delta > 0 && delta < 1)) throw FitError("delta must lie in (0, 1)");
  if (test_lines < 3) throw ModelError("at least three test lines are needed");
  if (test_contours < 1) throw ModelError("at least one test contour per run is needed");
  if (alphas.empty()) throw ModelError("no alpha levels given");
  for (double a : alphas) {
    if (!(a > 0 && a < 1)) throw ModelError("alpha levels must lie in (0, 1)");
  }
  if (!(iterations > burnin) || burnin < 0) throw FitError("iterations must exceed burn-in");
  if (predictive < 1 || oracle_samples < 1) throw ModelError("sample counts must be positive");
  if (grid < 2) throw ModelError("grid resolution must be at least 2");
  if (append) append->validate();
}

namespace {

std::vector<Polygon> draw_contours(const GscmParams& truth, int count, std::uint64_t seed,
                                   const std::optional<AppendSpec>& append) {
  const MatX y = sample_lengths(truth, count, seed);
  std::vector<Polygon> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const VecX row = y.row(j).transpose();
    if (append) {
      Rng rng(seed, "append", static_cast<std::uint64_t>(j));
      out[j] = append_section(truth.lines, row, *append, rng);
    } else {
      out[j] = points_from_lengths(truth.lines, row);
    }
  }
  return out;
}

}  // namespace

RunResult run_once(const ExperimentConfig& config, int run) {
  GscmParams truth = builtin_shape(config.shape);
  if (config.kappa) {
    truth.kappa = *config.kappa;
    truth.validate(config.shape == "C" ? 0.05 : 0.01);
  }
  const std::uint64_t seed = derive_seed(config.seed, "run", static_cast<std::uint64_t>(run));
  RunResult out;
  out.run = run;

  const auto tests = draw_contours(truth, config.test_contours, derive_seed(seed, "test"), config.append);
  std::vector<Polygon> samples;
  if (config.oracle) {
    samples = draw_contours(truth, config.oracle_samples, derive_seed(seed, "oracle"), config.append);
    out.p_hat = truth.p();
    out.c_hat = truth.lines.center();
  } else {
    const auto train = draw_contours(truth, config.n_train, derive_seed(seed, "train"), config.append);
    FitConfig fc;
    fc.delta = config.delta;
    fc.growth = config.growth;
    fc.mode = config.mode;
    fc.lattice = config.lattice;
    std::optional<LineSet> lines;
    if (config.fixed_lines > 0) {
      const VecX theta = LineSet::evenly({0, 0}, config.fixed_lines).angles();
      const StartPointFit sp = find_C_given_theta(train, theta, fc);
      lines = LineSet(sp.center, theta);
      out.mean_area = sp.mean_area;
    } else {
      const LineFit lf = find_C_and_theta(train, fc);
      lines = lf.lines;
      out.mean_area = lf.mean_area;
    }
    out.p_hat = lines->size();
    out.c_hat = lines->center();
    if (config.selection_only) return out;

    const MatX y = observed_lengths(train, *lines, config.mode);
    Hyperparameters hyper;
    hyper.mu0 = VecX::Constant(out.p_hat, config.mu0);
    hyper.lambda0 = config.lambda0 * MatX::Identity(out.p_hat, out.p_hat);
    hyper.beta_kappa = config.beta_kappa;
    hyper.beta_sigma = VecX::Constant(out.p_hat, config.beta_sigma);
    McmcConfig mc;
    mc.iterations = config.iterations;
    mc.burnin = config.burnin;
    mc.seed = derive_seed(seed, "mcmc");
    const PosteriorSamples post = mcmc_fit(y, lines->angles(), hyper, mc);
    out.accept_sigma = post.accept_sigma;
    out.accept_kappa = post.accept_kappa;
    samples = posterior_predictive(post, *lines, config.predictive, truth.eta, derive_seed(seed, "predictive"));
  }

  std::vector<Polygon> all = samples;
  all.insert(all.end(), tests.begin(), tests.end());
  const GridGeometry geom = covering_grid(all, 1.0 / config.grid, {{0, 0}, {1, 1}});
  const ProbabilityGrid pg = gridded_probability(samples, geom);
  const TestLineSet test_lines(truth.lines.center(), config.test_lines);
  for (double alpha : config.alphas) {
    const std::vector<CredibleRegion> region{credible_region(pg, alpha)};
    out.w.push_back(coverage_report(tests, region, test_lines).w);
  }
  return out;
}

void summarize(ExperimentResult& result) {
  const auto& runs = result.runs;
  double sum = 0;
  for (const auto& r : runs) sum += r.p_hat;
  result.mean_p_hat = sum / static_cast<double>(runs.size());
  double ss = 0;
  for (const auto& r : runs) ss += (r.p_hat - result.mean_p_hat) * (r.p_hat - result.mean_p_hat);
  result.sd_p_hat = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;

  result.coverage.clear();
  if (runs.empty() || runs.front().w.empty()) return;
  const TestLineSet lines({0, 0}, result.config.test_lines);
  VecX angles(lines.size());
  for (int k = 0; k < lines.size(); ++k) angles[k] = lines.angle(k);
  for (std::size_t a = 0; a < result.config.alphas.size(); ++a) {
    Index rows = 0;
    for (const auto& r : runs) rows += r.w[a].rows();
    Eigen::MatrixXi w(rows, lines.size());
    Index at = 0;
    for (const auto& r : runs) {
      w.middleRows(at, r.w[a].rows()) = r.w[a];
      at += r.w[a].rows();
    }
    result.coverage.push_back(make_report(result.config.alphas[a], std::move(w), angles));
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.runs.resize(static_cast<std::size_t>(config.runs));
  parallel_for(result.runs.size(), [&](std::size_t r) { result.runs[r] = run_once(config, static_cast<int>(r)); });
  summarize(result);
  return result;
}

}  // namespace gscm
