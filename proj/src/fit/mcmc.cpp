#include "gscm/fit.hpp"
#include "gscm/parallel.hpp"

#include <cmath>
#include <limits>

namespace gscm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
// Keeps 1 / sigma finite when the data pin a line's length exactly.
constexpr double kSigmaFloor = 1e-10;

}  // namespace

Hyperparameters Hyperparameters::simulation_defaults(int p) {
  Hyperparameters h;
  h.mu0 = VecX::Constant(p, 0.2);
  h.lambda0 = 0.05 * MatX::Identity(p, p);
  h.beta_kappa = 8.0;
  h.beta_sigma = VecX::Constant(p, 0.15);
  return h;
}

void Hyperparameters::validate(int p) const {
  if (mu0.size() != p) throw FitError("mu0 must have one entry per line");
  if (lambda0.rows() != p || lambda0.cols() != p) throw FitError("Lambda0 must be p x p");
  if (!lambda0.isApprox(lambda0.transpose(), 1e-12)) throw FitError("Lambda0 must be symmetric");
  if (Eigen::LLT<MatX>(lambda0).info() != Eigen::Success) throw FitError("Lambda0 must be positive definite");
  if (!(beta_kappa > 0)) throw FitError("beta_kappa must be positive");
  if (beta_sigma.size() != p) throw FitError("beta_sigma must have one entry per line");
  if (!(beta_sigma.array() > 0).all()) throw FitError("beta_sigma must be positive");
}

double log_posterior(const MatX& y, const VecX& mu, const VecX& sigma, double kappa, const VecX& theta,
                     const Hyperparameters& hyper) {
  const Index p = theta.size();
  hyper.validate(static_cast<int>(p));
  if (y.cols() != p || mu.size() != p || sigma.size() != p) throw FitError("dimension mismatch");
  if (!(kappa > 0 && kappa < hyper.beta_kappa)) return -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < p; ++i) {
    if (!(sigma[i] > 0 && sigma[i] < hyper.beta_sigma[i])) return -std::numeric_limits<double>::infinity();
  }
  double lp = -std::log(hyper.beta_kappa) - hyper.beta_sigma.array().log().sum();

  const Eigen::LLT<MatX> prior(hyper.lambda0);
  const VecX dm = prior.matrixL().solve(mu - hyper.mu0);
  const double prior_logdet = 2 * prior.matrixL().toDenseMatrix().diagonal().array().log().sum();
  lp += -0.5 * (p * kLogTwoPi + prior_logdet + dm.squaredNorm());

  if (y.rows() == 0) return lp;
  const Eigen::LLT<MatX> chol = factorize_with_jitter(exp_covariance(sigma, kappa, theta));
  const MatX lower = chol.matrixL();
  const double logdet = 2 * lower.diagonal().array().log().sum();
  for (Index j = 0; j < y.rows(); ++j) {
    const VecX r = lower.triangularView<Eigen::Lower>().solve(VecX(y.row(j).transpose() - mu));
    lp += -0.5 * (p * kLogTwoPi + logdet + r.squaredNorm());
  }
  return lp;
}

namespace {

// Correlation-level state shared by the sigma and kappa blocks.
struct CorrelationState {
  MatX q;  // inverse correlation
  double logdet = 0.0;
};

CorrelationState correlation_state(double kappa, const VecX& theta) {
  const Eigen::LLT<MatX> llt = factorize_with_jitter(exp_correlation(kappa, theta));
  CorrelationState s;
  s.q = llt.solve(MatX::Identity(theta.size(), theta.size()));
  s.logdet = 2 * MatX(llt.matrixL()).diagonal().array().log().sum();
  return s;
}

struct Adapter {
  double step;
  int accepted = 0;
  int proposed = 0;

  void record(bool ok) {
    ++proposed;
    accepted += ok ? 1 : 0;
  }
  void adapt() {
    if (proposed == 0) return;
    const double rate = static_cast<double>(accepted) / proposed;
    if (rate < 0.2) step *= 0.7;
    if (rate > 0.4) step *= 1.4;
    accepted = 0;
    proposed = 0;
  }
};

}  // namespace

PosteriorSamples mcmc_fit(const MatX& y, const VecX& theta, const Hyperparameters& hyper, const McmcConfig& config) {
  const Index p = theta.size();
  const Index n = y.rows();
  hyper.validate(static_cast<int>(p));
  if (y.cols() != p) throw FitError("length matrix must have one column per line");
  if (n < 1) throw FitError("at least one observed contour is needed");
  if (!(config.iterations > config.burnin) || config.burnin < 0) throw FitError("iterations must exceed burn-in");
  if (config.adapt_interval < 1) throw FitError("adaptation interval must be positive");

  Rng rng(config.seed, "mcmc");
  const VecX ysum = y.colwise().sum().transpose();
  const Eigen::LLT<MatX> prior(hyper.lambda0);
  const MatX prior_prec = prior.solve(MatX::Identity(p, p));
  const VecX prior_shift = prior.solve(hyper.mu0);

  VecX mu = ysum / static_cast<double>(n);
  VecX sigma(p);
  for (Index i = 0; i < p; ++i) {
    const double sd = n > 1 ? std::sqrt((y.col(i).array() - mu[i]).square().sum() / (n - 1)) : 0.5 * hyper.beta_sigma[i];
    sigma[i] = std::clamp(sd, 1e-3 * hyper.beta_sigma[i], 0.9 * hyper.beta_sigma[i]);
  }
  double kappa = std::min(1.0, 0.5 * hyper.beta_kappa);
  CorrelationState corr = correlation_state(kappa, theta);

  std::vector<Adapter> sigma_steps(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) sigma_steps[i].step = 0.5 * sigma[i];
  Adapter kappa_step{0.5 * kappa};
  long sigma_accepted = 0, sigma_proposed = 0, kappa_accepted = 0, kappa_proposed = 0;

  const int kept = config.iterations - config.burnin;
  PosteriorSamples out;
  out.seed = config.seed;
  out.kappa.resize(kept);
  out.mu.resize(kept, p);
  out.sigma.resize(kept, p);

  VecX z(p);
  for (int it = 0; it < config.iterations; ++it) {
    // mu | sigma, kappa is Gaussian.
    {
      const VecX w = sigma.cwiseInverse();
      const MatX prec_lik = w.asDiagonal() * corr.q * w.asDiagonal();
      const MatX post_prec = prior_prec + static_cast<double>(n) * prec_lik;
      const Eigen::LLT<MatX> llt(post_prec);
      const VecX mean = llt.solve(prior_shift + prec_lik * ysum);
      for (Index i = 0; i < p; ++i) z[i] = rng.normal();
      mu = mean + llt.matrixU().solve(z);
    }

    const MatX resid = y.rowwise() - mu.transpose();
    const MatX scatter = resid.transpose() * resid;
    MatX m = corr.q.cwiseProduct(scatter);
    VecX w = sigma.cwiseInverse();
    VecX v = m * w;

    // sigma_i: random walk on sigma_i, tracked through w_i = 1 / sigma_i.
    for (Index i = 0; i < p; ++i) {
      auto& ad = sigma_steps[i];
      const double prop = sigma[i] + ad.step * rng.normal();
      bool ok = false;
      if (prop > kSigmaFloor * hyper.beta_sigma[i] && prop < hyper.beta_sigma[i]) {
        const double d = 1.0 / prop - w[i];
        const double dquad = 2 * d * v[i] + d * d * m(i, i);
        const double log_ratio = -static_cast<double>(n) * (std::log(prop) - std::log(sigma[i])) - 0.5 * dquad;
        ok = metropolis_accept(log_ratio, rng.uniform());
        if (ok) {
          sigma[i] = prop;
          w[i] += d;
          v += d * m.col(i);
        }
      } else {
        rng.uniform();
      }
      ad.record(ok);
      ++sigma_proposed;
      sigma_accepted += ok ? 1 : 0;
    }

    // kappa: scalar random walk; the correlation is refactored per proposal.
    {
      const double prop = kappa + kappa_step.step * rng.normal();
      bool ok = false;
      if (prop > 0 && prop < hyper.beta_kappa) {
        try {
          CorrelationState next = correlation_state(prop, theta);
          const double quad_old = w.dot(v);
          const double quad_new = w.dot(next.q.cwiseProduct(scatter) * w);
          const double log_ratio = -0.5 * static_cast<double>(n) * (next.logdet - corr.logdet) - 0.5 * (quad_new - quad_old);
          ok = metropolis_accept(log_ratio, rng.uniform());
          if (ok) {
            kappa = prop;
            corr = std::move(next);
          }
        } catch (const ModelError&) {
          rng.uniform();
        }
      } else {
        rng.uniform();
      }
      kappa_step.record(ok);
      ++kappa_proposed;
      kappa_accepted += ok ? 1 : 0;
    }

    if (it < config.burnin && (it + 1) % config.adapt_interval == 0) {
      for (auto& ad : sigma_steps) ad.adapt();
      kappa_step.adapt();
    }
    if (it == config.burnin - 1) {
      sigma_accepted = sigma_proposed = kappa_accepted = kappa_proposed = 0;
    }
    if (it >= config.burnin) {
      const Index row = it - config.burnin;
      out.kappa[row] = kappa;
      out.mu.row(row) = mu.transpose();
      out.sigma.row(row) = sigma.transpose();
    }
  }
  out.accept_sigma = sigma_proposed ? static_cast<double>(sigma_accepted) / sigma_proposed : 0.0;
  out.accept_kappa = kappa_proposed ? static_cast<double>(kappa_accepted) / kappa_proposed : 0.0;
  return out;
}

std::vector<Polygon> posterior_predictive(const PosteriorSamples& samples, const LineSet& lines, int k, double eta,
                                          std::uint64_t seed, const LineMask* mask) {
  if (samples.draws() < 1) throw ModelError("posterior has no draws");
  if (k < 1) throw ModelError("sample count must be positive");
  const int p = lines.size();
  const Index modeled = samples.mu.cols();
  if (mask ? static_cast<Index>(mask->modeled.size()) != modeled : modeled != p) {
    throw ModelError("posterior dimension does not match the line set");
  }
  std::vector<int> index(static_cast<std::size_t>(modeled));
  for (Index i = 0; i < modeled; ++i) index[i] = mask ? mask->modeled[i] : static_cast<int>(i);
  VecX sub_theta(modeled);
  for (Index i = 0; i < modeled; ++i) sub_theta[i] = lines.angles()[index[i]];

  std::vector<Polygon> out(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t j) {
    const Index draw = static_cast<Index>(j) * samples.draws() / k;
    const VecX mu = samples.mu.row(draw).transpose();
    const VecX sigma = samples.sigma.row(draw).transpose();
    const MatX chol = factorize_with_jitter(exp_covariance(sigma, samples.kappa[draw], sub_theta)).matrixL();
    Rng rng(seed, "predictive", j);
    const VecX part = draw_lengths(mu, chol, eta, rng);
    VecX full = mask ? mask->constant : VecX::Zero(p);
    for (Index i = 0; i < modeled; ++i) full[index[i]] = part[i];
    out[j] = points_from_lengths(lines, full);
  });
  return out;
}

}  // namespace gscm
