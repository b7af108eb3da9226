#include "gscm/parallel.hpp"
#include "gscm/simlab.hpp"

#include <algorithm>

namespace gscm {

std::vector<MatX> synthetic_rasters(const GscmParams& params, int count, const GridGeometry& geom, double noise,
                                    std::uint64_t seed) {
  if (!(noise >= 0 && noise < 1)) throw ModelError("noise amplitude must lie in [0, 1)");
  const auto contours = sample_contours(params, count, derive_seed(seed, "raster-contours"));
  std::vector<MatX> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    MatX c = cell_coverage(contours[k], geom);
    Rng rng(seed, "raster-noise", static_cast<std::uint64_t>(k));
    for (Index i = 0; i < c.rows(); ++i) {
      for (Index j = 0; j < c.cols(); ++j) c(i, j) = std::clamp(c(i, j) + noise * (2 * rng.uniform() - 1), 0.0, 1.0);
    }
    out[k] = std::move(c);
  }
  return out;
}

Polygon contour_from_concentration(const MatX& conc, const GridGeometry& geom, double threshold) {
  geom.validate();
  if (conc.rows() != geom.rows || conc.cols() != geom.cols) throw GeometryError("raster size does not match its header");
  BinaryGrid g(geom);
  for (int i = 0; i < geom.rows; ++i) {
    for (int j = 0; j < geom.cols; ++j) g.set(i, j, conc(i, j) >= threshold);
  }
  if (g.count() == 0) throw GeometryError("no region at or above the threshold");
  return grid_to_contour(fill_holes(largest_region(g)));
}

CrossValidationResult leave_one_out(std::span<const Polygon> contours, const CrossValidationConfig& config) {
  const auto n = contours.size();
  if (n < 3) throw FitError("leave-one-out needs at least three contours");
  CrossValidationResult result;
  result.folds.resize(n);
  parallel_for(n, [&](std::size_t held) {
    std::vector<Polygon> train;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != held) train.push_back(contours[j]);
    }
    const Rescaled scaled = rescale(train, config.epsilon);
    const Polygon test = scaled.transform.apply(contours[held]);

    FitConfig fc;
    fc.delta = config.delta;
    fc.growth = config.growth;
    fc.mode = config.mode;
    fc.lattice = config.lattice;
    fc.epsilon = config.epsilon;
    const LineFit lf = find_C_and_theta(scaled.contours, fc);
    const MatX y = observed_lengths(scaled.contours, lf.lines, config.mode);
    const LineMask mask = config.drop_constant_lines ? LineMask::from_lengths(y) : LineMask::all(lf.lines.size());
    const int q = static_cast<int>(mask.modeled.size());
    Hyperparameters hyper = Hyperparameters::simulation_defaults(q);
    McmcConfig mc;
    mc.iterations = config.iterations;
    mc.burnin = config.burnin;
    const std::uint64_t seed = derive_seed(config.seed, "fold", held);
    mc.seed = derive_seed(seed, "mcmc");
    const PosteriorSamples post = mcmc_fit(mask.select(y), mask.select(lf.lines.angles()), hyper, mc);
    const auto samples =
        posterior_predictive(post, lf.lines, config.predictive, 1e-4, derive_seed(seed, "predictive"), &mask);

    std::vector<Polygon> all = samples;
    all.push_back(test);
    const GridGeometry geom = covering_grid(all, 1.0 / config.grid, {{0, 0}, {1, 1}});
    const ProbabilityGrid pg = gridded_probability(samples, geom);
    const TestLineSet lines(lf.lines.center(), config.test_lines);

    FoldResult& fold = result.folds[held];
    fold.held_out = static_cast<int>(held);
    fold.p_hat = lf.lines.size();
    fold.c_hat = lf.lines.center();
    const bool admissible = point_in_polygon(lf.lines.center(), test) == Location::inside;
    for (double alpha : config.alphas) {
      if (!admissible) {
        fold.w.push_back(Eigen::MatrixXi::Zero(1, config.test_lines));
        continue;
      }
      const std::vector<CredibleRegion> region{credible_region(pg, alpha)};
      const std::vector<Polygon> one{test};
      fold.w.push_back(coverage_report(one, region, lines).w);
    }
  });

  const TestLineSet lines({0, 0}, config.test_lines);
  VecX angles(config.test_lines);
  for (int k = 0; k < config.test_lines; ++k) angles[k] = lines.angle(k);
  for (std::size_t a = 0; a < config.alphas.size(); ++a) {
    Eigen::MatrixXi w(static_cast<Index>(n), config.test_lines);
    for (std::size_t f = 0; f < n; ++f) w.row(static_cast<Index>(f)) = result.folds[f].w[a];
    result.coverage.push_back(make_report(config.alphas[a], std::move(w), angles));
  }
  return result;
}

}  // namespace gscm
