#include "doctest.h"
#include "gscm/fit.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace gscm;

namespace {

Polygon square(double x0, double y0, double side) {
  return Polygon({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

Polygon l_shape() { return Polygon({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}); }

std::vector<Polygon> noisy_circles(int n, std::uint64_t seed, double sd = 0.02) {
  const int p = 40;
  const GscmParams params(LineSet::evenly({0.5, 0.5}, p), VecX::Constant(p, 0.3), VecX::Constant(p, sd), 1.0);
  return sample_contours(params, n, seed);
}

// Multivariate normal log density with the inverse written out by cofactors.
double mvn3_logpdf(const Eigen::Vector3d& x, const Eigen::Vector3d& m, const Eigen::Matrix3d& s) {
  const double a = s(0, 0), b = s(0, 1), c = s(0, 2), e = s(1, 1), f = s(1, 2), i = s(2, 2);
  const double det = a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c);
  Eigen::Matrix3d inv;
  inv << e * i - f * f, c * f - b * i, b * f - c * e,
         c * f - b * i, a * i - c * c, b * c - a * f,
         b * f - c * e, b * c - a * f, a * e - b * b;
  inv /= det;
  const Eigen::Vector3d d = x - m;
  return -0.5 * (3 * std::log(2 * kPi) + std::log(det) + d.dot(inv * d));
}

Hyperparameters hyper_for(int p) {
  Hyperparameters h = Hyperparameters::simulation_defaults(p);
  h.beta_sigma = VecX::Constant(p, 0.5);
  return h;
}

}  // namespace

TEST_CASE("rescaling maps the global box onto the buffered unit square") {
  const std::vector<Polygon> in{square(2, 4, 2), square(3, 3, 1)};
  const Rescaled r = rescale(in, 0.1);
  CHECK((r.transform.lo - Point(2, 3)).norm() == 0.0);
  CHECK((r.transform.hi - Point(4, 6)).norm() == 0.0);
  CHECK((r.transform.apply(Point(2, 3)) - Point(0.1, 0.1)).norm() < 1e-15);
  CHECK((r.transform.apply(Point(4, 6)) - Point(0.9, 0.9)).norm() < 1e-15);
  CHECK((r.transform.apply(Point(3, 4.5)) - Point(0.5, 0.5)).norm() < 1e-15);
  for (const auto& c : r.contours) {
    CHECK(c.bounds().lo.minCoeff() >= 0.1 - 1e-15);
    CHECK(c.bounds().hi.maxCoeff() <= 0.9 + 1e-15);
  }
  const Polygon back = r.transform.invert(r.contours[0]);
  for (std::size_t k = 0; k < back.size(); ++k) CHECK((back.vertices()[k] - in[0].vertices()[k]).norm() < 1e-14);
  CHECK(r.contours[0].area() == doctest::Approx(4 * 0.8 * 0.8 / 6));

  CHECK_THROWS_AS(rescale(std::vector<Polygon>{}, 0.1), FitError);
  CHECK_THROWS_AS(rescale(in, 0.5), FitError);
}

TEST_CASE("fit configuration checks") {
  FitConfig c;
  CHECK_NOTHROW(c.validate());
  c.delta = 0;
  CHECK_THROWS_AS(c.validate(), FitError);
  c = {};
  c.growth = 1.0;
  CHECK_THROWS_AS(c.validate(), FitError);
  c = {};
  c.max_lines = 4;
  CHECK_THROWS_AS(c.validate(), FitError);
}

TEST_CASE("growth schedule") {
  CHECK(next_line_count(8, 1.25) == 10);
  CHECK(next_line_count(10, 1.25) == 13);
  CHECK(next_line_count(8, 1.01) == 9);
  CHECK(next_line_count(40, 1.25) == 50);
  int p = 8;
  for (int k = 0; k < 30; ++k) {
    const int q = next_line_count(p, 1.05);
    CHECK(q > p);
    p = q;
  }
}

TEST_CASE("admissible lattice for a single convex contour") {
  const std::vector<Polygon> one{square(0, 0, 1)};
  const auto pts = admissible_lattice(one, Mode::exact, 25);
  CHECK(pts.size() == 625);
  CHECK((pts.front() - Point(0.02, 0.02)).norm() < 1e-12);
  CHECK((pts[1] - Point(0.06, 0.02)).norm() < 1e-12);
  for (Mode m : {Mode::under, Mode::over}) {
    const auto q = admissible_lattice(one, m, 25);
    CHECK(q.size() == 625);
  }
}

TEST_CASE("admissible lattice respects the common kernel or interior") {
  const std::vector<Polygon> two{l_shape(), square(0.1, 0.1, 0.5)};
  const auto ker = kernel_intersection(two);
  REQUIRE(ker);
  for (const auto& c : admissible_lattice(two, Mode::exact, 25)) CHECK(in_kernel(c, *ker));
  for (const auto& c : admissible_lattice(two, Mode::under, 25)) {
    for (const auto& s : two) CHECK(point_in_polygon(c, s) == Location::inside);
  }
  const std::vector<Polygon> apart{square(0, 0, 1), square(2, 0, 1)};
  CHECK_THROWS_AS(admissible_lattice(apart, Mode::exact, 25), FitError);
  CHECK_THROWS_AS(admissible_lattice(apart, Mode::under, 25), FitError);
}

TEST_CASE("a tiny kernel falls back to its vertex centroid") {
  const std::vector<Polygon> two{square(0, 0, 1), square(0.999, 0.999, 1)};
  const auto pts = admissible_lattice(two, Mode::exact, 2);
  CHECK(pts.size() >= 1);
  const auto ker = kernel_intersection(two);
  REQUIRE(ker);
  for (const auto& c : pts) CHECK(in_kernel(c, *ker, 0.0));
}

TEST_CASE("start point optimization stays admissible and breaks ties early") {
  const auto contours = noisy_circles(10, 4);
  const VecX theta = LineSet::evenly({0, 0}, 30).angles();
  for (Mode m : {Mode::exact, Mode::under, Mode::over}) {
    FitConfig cfg;
    cfg.mode = m;
    cfg.lattice = 10;
    const StartPointFit fit = find_C_given_theta(contours, theta, cfg);
    const auto cands = admissible_lattice(contours, m, cfg.lattice);
    CHECK(std::find(cands.begin(), cands.end(), fit.center) != cands.end());
    for (const auto& c : cands) {
      CHECK(fit.mean_area <= mean_differing_area(contours, LineSet(c, theta), m));
    }
    CHECK((fit.center - Point(0.5, 0.5)).norm() < 0.1);
  }
  // Identical candidates: the first one wins.
  const std::vector<Point> same{{0.5, 0.5}, {0.5, 0.5}};
  CHECK(find_C_given_theta(contours, theta, Mode::exact, same).center == same[0]);
}

TEST_CASE("line growth meets the differing-area bound at return") {
  const auto contours = noisy_circles(8, 2);
  FitConfig cfg;
  cfg.lattice = 8;
  const LineFit a = find_theta_given_C(contours, {0.5, 0.5}, cfg);
  CHECK(a.mean_area < cfg.delta * mean_polygon_area(contours));
  CHECK(mean_differing_area(contours, a.lines, cfg.mode) == doctest::Approx(a.mean_area).epsilon(1e-12));
  CHECK(a.tried.front() == 8);
  CHECK(a.tried.back() == a.lines.size());
  for (std::size_t k = 1; k < a.tried.size(); ++k) CHECK(a.tried[k] == next_line_count(a.tried[k - 1], cfg.growth));
  // Every earlier count violated the bound.
  for (std::size_t k = 0; k + 1 < a.tried.size(); ++k) {
    CHECK(mean_differing_area(contours, LineSet::evenly({0.5, 0.5}, a.tried[k]), cfg.mode) >= a.bound);
  }

  const LineFit b = find_C_and_theta(contours, cfg);
  CHECK(b.mean_area < b.bound);
  CHECK(mean_differing_area(contours, b.lines, cfg.mode) == doctest::Approx(b.mean_area).epsilon(1e-12));
  CHECK(b.lines.size() <= a.lines.size() + 20);
}

TEST_CASE("under mode terminates on non-star contours") {
  const std::vector<Polygon> contours{l_shape(), Polygon({{0, 0}, {1, 0}, {1, 0.45}, {0.55, 0.45}, {0.55, 1}, {0, 1}})};
  FitConfig cfg;
  cfg.mode = Mode::under;
  cfg.lattice = 10;
  const LineFit f = find_C_and_theta(contours, cfg);
  CHECK(f.mean_area < cfg.delta * mean_polygon_area(contours));
}

TEST_CASE("the line cap raises an error") {
  const std::vector<Polygon> contours{l_shape()};
  FitConfig cfg;
  cfg.mode = Mode::under;
  cfg.delta = 1e-6;
  cfg.max_lines = 20;
  cfg.lattice = 5;
  CHECK_THROWS_AS(find_C_and_theta(contours, cfg), FitError);
  CHECK_THROWS_AS(find_theta_given_C(contours, {0.25, 0.25}, cfg), FitError);
}

TEST_CASE("start points map back through the rescaling") {
  std::vector<Polygon> raw;
  for (const auto& c : noisy_circles(6, 8)) {
    std::vector<Point> pts;
    for (const auto& v : c.vertices()) pts.push_back(3.0 * v + Point(10, -2));
    raw.emplace_back(pts);
  }
  Bounds box = raw[0].bounds();
  for (const auto& c : raw) {
    box.lo = box.lo.cwiseMin(c.bounds().lo);
    box.hi = box.hi.cwiseMax(c.bounds().hi);
  }
  // A bounding square contour makes the rescaling a uniform scale plus shift.
  const double side = std::max(box.hi.x() - box.lo.x(), box.hi.y() - box.lo.y());
  raw.push_back(Polygon({box.lo, box.lo + Point(side, 0), box.lo + Point(side, side), box.lo + Point(0, side)}));
  const Rescaled r = rescale(raw, 0.1);
  const VecX theta = LineSet::evenly({0, 0}, 24).angles();
  FitConfig cfg;
  cfg.lattice = 12;
  const StartPointFit scaled = find_C_given_theta(r.contours, theta, cfg);
  const StartPointFit direct = find_C_given_theta(raw, theta, cfg);
  const Point back = r.transform.invert(scaled.center);
  const auto ker = kernel_intersection(raw);
  REQUIRE(ker);
  const Point spacing = (ker->bounds().hi - ker->bounds().lo) / cfg.lattice;
  CHECK(std::abs(back.x() - direct.center.x()) <= spacing.x() + 1e-9);
  CHECK(std::abs(back.y() - direct.center.y()) <= spacing.y() + 1e-9);
}

TEST_CASE("observed lengths of a square") {
  const std::vector<Polygon> sq{square(0, 0, 1), square(-0.5, -0.5, 2)};
  const LineSet lines = LineSet::evenly({0.5, 0.5}, 8);
  const MatX y = observed_lengths(sq, lines, Mode::exact);
  CHECK(y.rows() == 2);
  CHECK(y.cols() == 8);
  for (int i = 0; i < 8; ++i) {
    const double expect = i % 2 == 0 ? 0.5 * std::sqrt(2.0) : 0.5;
    CHECK(y(0, i) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(y(1, i) == doctest::Approx(2 * expect).epsilon(1e-12));
  }
}

TEST_CASE("line masks drop constant lines") {
  MatX y(3, 4);
  y << 1, 2, 3, 4,
       1, 2.5, 3, 4.5,
       1, 2.2, 3, 4.1;
  const LineMask m = LineMask::from_lengths(y);
  CHECK(m.modeled == std::vector<int>{1, 3});
  CHECK(m.constant[0] == 1);
  CHECK(m.constant[2] == 3);
  CHECK_FALSE(m.trivial(4));
  CHECK(m.select(y).col(1) == y.col(3));
  CHECK(LineMask::all(4).trivial(4));
  CHECK_THROWS_AS(LineMask::from_lengths(MatX::Ones(3, 4)), ModelError);
}

TEST_CASE("log posterior matches an explicit three-line evaluation") {
  Rng rng(21);
  const VecX theta = LineSet::evenly({0, 0}, 3).angles();
  Hyperparameters h = hyper_for(3);
  h.mu0 << 0.2, 0.25, 0.3;
  h.lambda0 << 0.05, 0.01, 0.0, 0.01, 0.04, 0.005, 0.0, 0.005, 0.06;
  for (int trial = 0; trial < 10; ++trial) {
    MatX y(2, 3);
    for (Index i = 0; i < y.size(); ++i) y.data()[i] = rng.uniform(0.1, 0.5);
    VecX mu(3), sigma(3);
    for (int i = 0; i < 3; ++i) {
      mu[i] = rng.uniform(0.1, 0.4);
      sigma[i] = rng.uniform(0.01, 0.4);
    }
    const double kappa = rng.uniform(0.1, 7.9);

    Eigen::Matrix3d s;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double d = std::abs(theta[i] - theta[j]);
        d = std::min(d, 2 * kPi - d);
        s(i, j) = sigma[i] * sigma[j] * std::exp(-d / kappa);
      }
    }
    double expect = -std::log(8.0) - 3 * std::log(0.5);
    expect += mvn3_logpdf(mu, h.mu0, h.lambda0);
    for (int j = 0; j < 2; ++j) expect += mvn3_logpdf(y.row(j).transpose(), mu, s);
    CHECK(log_posterior(y, mu, sigma, kappa, theta, h) == doctest::Approx(expect).epsilon(1e-10));

    MatX swapped = y;
    swapped.row(0) = y.row(1);
    swapped.row(1) = y.row(0);
    CHECK(log_posterior(swapped, mu, sigma, kappa, theta, h) ==
          doctest::Approx(log_posterior(y, mu, sigma, kappa, theta, h)).epsilon(1e-13));
  }
}

TEST_CASE("log posterior degenerate and boundary cases") {
  Hyperparameters h;
  h.mu0 = VecX::Constant(1, 0.3);
  h.lambda0 = MatX::Constant(1, 1, 0.04);
  h.beta_kappa = 4;
  h.beta_sigma = VecX::Constant(1, 0.5);
  const VecX theta = VecX::Constant(1, kTwoPi);
  MatX y(2, 1);
  y << 0.35, 0.28;
  const VecX mu = VecX::Constant(1, 0.31);
  const VecX sigma = VecX::Constant(1, 0.05);
  auto normal = [](double x, double m, double v) { return -0.5 * std::log(2 * kPi * v) - 0.5 * (x - m) * (x - m) / v; };
  const double expect = -std::log(4.0) - std::log(0.5) + normal(0.31, 0.3, 0.04) + normal(0.35, 0.31, 0.0025) +
                        normal(0.28, 0.31, 0.0025);
  CHECK(log_posterior(y, mu, sigma, 1.0, theta, h) == doctest::Approx(expect).epsilon(1e-12));

  const MatX none(0, 1);
  CHECK(log_posterior(none, mu, sigma, 1.0, theta, h) ==
        doctest::Approx(-std::log(4.0) - std::log(0.5) + normal(0.31, 0.3, 0.04)).epsilon(1e-12));

  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_posterior(y, mu, sigma, 4.0, theta, h) == ninf);
  CHECK(log_posterior(y, mu, sigma, 0.0, theta, h) == ninf);
  CHECK(log_posterior(y, mu, VecX::Constant(1, 0.6), 1.0, theta, h) == ninf);
  CHECK(log_posterior(y, mu, VecX::Constant(1, 0.0), 1.0, theta, h) == ninf);
}

TEST_CASE("symmetric Metropolis steps satisfy detailed balance on two states") {
  // Exhaustive over a fine grid of the uniform draw.
  for (const auto& [pa, pb] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {0.5, 0.5}, {0.9, 0.1}, {0.01, 0.99}}) {
    const int grid = 100000;
    auto accept_rate = [&](double from, double to) {
      int acc = 0;
      for (int k = 0; k < grid; ++k) acc += metropolis_accept(std::log(to) - std::log(from), (k + 0.5) / grid);
      return static_cast<double>(acc) / grid;
    };
    // Proposal always offers the other state.
    const double pab = accept_rate(pa, pb);
    const double pba = accept_rate(pb, pa);
    CHECK(pa * pab == doctest::Approx(pb * pba).epsilon(1e-4));
    // The stationary distribution of the 2x2 chain is the target.
    const double stay_a = 1 - pab;
    const double next_a = pa * stay_a + pb * pba;
    CHECK(next_a == doctest::Approx(pa).epsilon(1e-4));
  }
}

TEST_CASE("posterior concentrates on identical rows") {
  const int p = 8;
  VecX row(p);
  for (int i = 0; i < p; ++i) row[i] = 0.25 + 0.01 * i;
  const MatX y = row.transpose().replicate(10, 1);
  McmcConfig cfg;
  cfg.iterations = 10000;
  cfg.burnin = 3000;
  const PosteriorSamples s = mcmc_fit(y, LineSet::evenly({0, 0}, p).angles(), hyper_for(p), cfg);
  const VecX mean = s.mu.colwise().mean().transpose();
  CHECK((mean - row).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(s.mu.allFinite());
}

TEST_CASE("posterior intervals cover the generating means") {
  const int p = 20;
  VecX mu(p), sigma(p);
  for (int i = 0; i < p; ++i) {
    mu[i] = 0.3 + 0.05 * std::sin(i);
    sigma[i] = 0.02 + 0.01 * (i % 3);
  }
  const LineSet lines = LineSet::evenly({0.5, 0.5}, p);
  const GscmParams truth(lines, mu, sigma, 1.5);
  const MatX y = sample_lengths(truth, 50, 77);
  McmcConfig cfg;
  cfg.iterations = 6000;
  cfg.burnin = 2000;
  cfg.seed = 5;
  const PosteriorSamples s = mcmc_fit(y, lines.angles(), Hyperparameters::simulation_defaults(p), cfg);
  int covered = 0;
  for (int i = 0; i < p; ++i) {
    std::vector<double> col(s.mu.col(i).data(), s.mu.col(i).data() + s.draws());
    std::sort(col.begin(), col.end());
    const double lo = col[static_cast<std::size_t>(0.025 * col.size())];
    const double hi = col[static_cast<std::size_t>(0.975 * col.size())];
    covered += (mu[i] >= lo && mu[i] <= hi) ? 1 : 0;
  }
  CHECK(covered >= 18);
  CHECK(s.accept_sigma > 0.1);
  CHECK(s.accept_sigma < 0.6);
  CHECK(s.accept_kappa > 0.1);
  CHECK(s.accept_kappa < 0.6);
  CHECK(s.kappa.minCoeff() > 0);
  CHECK(s.kappa.maxCoeff() < 8.0);
  CHECK(s.sigma.minCoeff() > 0);
  CHECK(s.sigma.maxCoeff() < 0.15);
}

TEST_CASE("the chain is reproducible for a fixed seed") {
  const auto contours = noisy_circles(6, 3);
  const LineSet lines = LineSet::evenly({0.5, 0.5}, 12);
  const MatX y = observed_lengths(contours, lines, Mode::exact);
  McmcConfig cfg;
  cfg.iterations = 600;
  cfg.burnin = 200;
  cfg.seed = 99;
  const auto hyper = Hyperparameters::simulation_defaults(12);
  const PosteriorSamples a = mcmc_fit(y, lines.angles(), hyper, cfg);
  const PosteriorSamples b = mcmc_fit(y, lines.angles(), hyper, cfg);
  CHECK(a.draws() == 400);
  CHECK(a.mu == b.mu);
  CHECK(a.sigma == b.sigma);
  CHECK(a.kappa == b.kappa);
  cfg.seed = 100;
  CHECK(mcmc_fit(y, lines.angles(), hyper, cfg).mu != a.mu);
  cfg.burnin = 600;
  CHECK_THROWS_AS(mcmc_fit(y, lines.angles(), hyper, cfg), FitError);
}

TEST_CASE("posterior predictive contours") {
  const int p = 10;
  const LineSet lines = LineSet::evenly({0.5, 0.5}, p);
  PosteriorSamples s;
  s.kappa = VecX::Constant(1, 1.0);
  s.mu = MatX::Constant(1, p, 0.3);
  s.sigma = MatX::Constant(1, p, 1e-9);
  const auto same = posterior_predictive(s, lines, 3, 1e-4, 1);
  REQUIRE(same.size() == 3);
  for (const auto& c : same) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      CHECK((c.vertices()[k] - same[0].vertices()[k]).norm() < 1e-6);
    }
  }

  s.sigma = MatX::Constant(1, p, 0.02);
  const auto draws = posterior_predictive(s, lines, 3, 1e-4, 1);
  CHECK((draws[0].vertices()[0] - draws[1].vertices()[0]).norm() > 0);
  const auto again = posterior_predictive(s, lines, 3, 1e-4, 1);
  for (int j = 0; j < 3; ++j) CHECK(again[j].vertices()[0] == draws[j].vertices()[0]);

  // Masked lines keep their constant length.
  LineMask mask;
  mask.modeled = {0, 2, 4, 6, 8};
  mask.constant = VecX::Constant(p, 0.4);
  PosteriorSamples sub;
  sub.kappa = VecX::Constant(2, 1.0);
  sub.mu = MatX::Constant(2, 5, 0.3);
  sub.sigma = MatX::Constant(2, 5, 0.01);
  const auto masked = posterior_predictive(sub, lines, 4, 1e-4, 2, &mask);
  for (const auto& c : masked) {
    const auto& v = c.vertices();
    const Point rel = v[1] - Point(0.5, 0.5);
    CHECK(rel.norm() == doctest::Approx(0.4).epsilon(1e-12));
  }
  CHECK_THROWS_AS(posterior_predictive(sub, lines, 4, 1e-4, 2), ModelError);
}

TEST_CASE("star-shapedness report") {
  const std::vector<Polygon> contours{square(0, 0, 1), l_shape()};
  const auto rows = star_shapedness_report(contours, 200, Mode::under, 10);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].contour_id == 0);
  CHECK(rows[0].pct_own_area < 0.1);
  CHECK(rows[1].pct_own_area >= 0.0);
  CHECK(rows[1].pct_mean_area == doctest::Approx(rows[1].pct_own_area * 0.75 / 0.875));

  const Polygon spiral({{0, 0}, {4, 0}, {4, 4}, {1, 4}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 1}, {0, 1}});
  const std::vector<Polygon> nonstar{spiral};
  for (Mode m : {Mode::under, Mode::over}) {
    const auto r = star_shapedness_report(nonstar, 200, m, 10);
    CHECK(r[0].pct_own_area > 0.1);
  }
}
