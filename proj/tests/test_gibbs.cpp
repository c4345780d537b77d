#include <doctest.h>
#include <omp.h>

#include "helpers.hpp"
#include "mcr/diagnostics.hpp"
#include "mcr/gibbs.hpp"
#include "mcr/mle.hpp"
#include "oracles.hpp"

using namespace mcr;
using namespace testing_support;

namespace {

struct Rows {
  Matrix W;  // n x d
  Matrix X;  // n x p
  NormalEquations ne;
};

Rows random_rows(Rng& rng, int n, int d, int p) {
  Rows r{random_matrix(rng, n, d, 1.0), random_matrix(rng, n, p, 1.0), NormalEquations::zeros(p, d)};
  r.ne.Q = r.W.transpose() * r.W;
  r.ne.L = r.X.transpose() * r.W;
  r.ne.S = r.X.transpose() * r.X;
  r.ne.count = n;
  return r;
}

}  // namespace

TEST_CASE("beta block agrees with direct conditioning") {
  Rng rng(1);
  Rows r = random_rows(rng, 30, 4, 1);
  const double s2 = 0.7;
  const Matrix Vinv = 0.01 * Matrix::Identity(4, 4);
  const auto f = [&](const Vector& b) {
    return -0.5 * (r.X.col(0) - r.W * b).squaredNorm() / s2 - 0.5 * b.dot(Vinv * b);
  };
  const auto ref = oracle::quadratic_conditional(f, 4);
  const Gaussian g = beta_conditional(r.ne, s2, Vinv).moments();
  CHECK(max_abs_diff(g.mean, ref.mean) < 1e-8);
  CHECK(max_abs_diff(g.covariance, ref.covariance) < 1e-8);
}

TEST_CASE("B block agrees with direct conditioning") {
  Rng rng(2);
  const int p = 2, d = 3;
  Rows r = random_rows(rng, 40, d, p);
  Matrix Sigma(2, 2);
  Sigma << 1.0, 0.3, 0.3, 0.5;
  const Matrix Si = Sigma.inverse();
  const Matrix Vinv = 0.1 * Matrix::Identity(p * d, p * d);
  const auto f = [&](const Vector& vb) {
    const Eigen::Map<const Matrix> B(vb.data(), p, d);
    double lp = -0.5 * vb.dot(Vinv * vb);
    for (int k = 0; k < r.W.rows(); ++k) {
      const Vector e = r.X.row(k).transpose() - B * r.W.row(k).transpose();
      lp -= 0.5 * e.dot(Si * e);
    }
    return lp;
  };
  const auto ref = oracle::quadratic_conditional(f, p * d);
  const Gaussian g = b_conditional(r.ne, Si, Vinv).moments();
  CHECK(max_abs_diff(g.mean, ref.mean) < 1e-8);
  CHECK(max_abs_diff(g.covariance, ref.covariance) < 1e-8);
}

TEST_CASE("variance steps have the right moments") {
  Rng rng(3);
  PriorSpec prior;
  const int n = 20000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += 1.0 / step_sigma2(50.0, 40, prior, rng);
  const double shape = 0.5 * (1.0 + 40), rate = 0.5 * (1.0 + 50.0);
  CHECK(acc / n == doctest::Approx(shape / rate).epsilon(0.02));

  Matrix rss(2, 2);
  rss << 30.0, 5.0, 5.0, 20.0;
  Matrix mean = Matrix::Zero(2, 2);
  for (int k = 0; k < n; ++k) mean += step_Sigma(rss, 40, prior, rng).inverse();
  mean /= n;
  const Matrix expect = (prior.eta0_or_default(2) + 40) * (Matrix::Identity(2, 2) + rss).inverse();
  CHECK(max_abs_diff(mean, expect) < 0.03 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("sampler is reproducible and thread-count independent") {
  ModelMode mode;
  mode.directed = true;
  const auto sim = simulate_random(4, 6, 8, 2, mode);
  SamplerConfig cfg;
  cfg.iterations = 120;
  cfg.burn_in = 20;
  cfg.chains = 2;
  cfg.seed = 17;
  omp_set_num_threads(1);
  const PosteriorSamples a = run_chain(sim.data, mode, PriorSpec{}, cfg);
  omp_set_num_threads(2);
  const PosteriorSamples b = run_chain(sim.data, mode, PriorSpec{}, cfg);
  omp_set_num_threads(1);
  REQUIRE(a.draws.size() == 200);
  REQUIRE(b.draws.size() == 200);
  for (std::size_t k = 0; k < a.draws.size(); ++k)
    CHECK(scalar_parameters(a.draws[k].params, mode) == scalar_parameters(b.draws[k].params, mode));
  CHECK(a.draws[0].chain == 0);
  CHECK(a.draws[100].chain == 1);
}

TEST_CASE("weak-prior posterior mean is close to the MLE") {
  ModelMode mode;
  const auto sim = simulate_random(5, 8, 25, 1, mode, false, false);
  PriorSpec prior;
  prior.beta_variance = 1e6;
  prior.b_variance = 1e6;
  SamplerConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 200;
  const PosteriorSamples s = run_chain(sim.data, mode, prior, cfg);
  const MleFit fit = fit_mle(sim.data, mode);
  const McrParams pm = s.posterior_mean();
  CHECK(pm.alpha1 == doctest::Approx(fit.params.alpha1).epsilon(0.02));
  CHECK(max_abs_diff(pm.A, fit.params.A) < 0.02);
  CHECK(max_abs_diff(pm.H, fit.params.H) < 0.02);
}

TEST_CASE("latent, ordinal and imputation variants run") {
  SUBCASE("latent attributes") {
    ModelMode mode;
    mode.attribute_scale = AttributeScale::latent;
    auto sim = simulate_random(6, 7, 4, 2, mode);
    sim.data.attributes = AttributeSeries::empty(7, 5);
    SamplerConfig cfg;
    cfg.iterations = 60;
    cfg.burn_in = 10;
    cfg.latent_dim = 2;
    cfg.store_latent_draws = true;
    const PosteriorSamples s = run_chain(sim.data, mode, PriorSpec{}, cfg);
    REQUIRE(s.draws.size() == 50);
    CHECK(s.draws.back().params.H(0, 1) == 0.0);
    CHECK(s.draws.back().latent.size() == 5);
    CHECK(s.attribute_mean.size() == 5);
  }
  SUBCASE("ordinal network with initial-state regression") {
    ModelMode mode;
    mode.directed = true;
    mode.network_scale = NetworkScale::ordinal;
    mode.attribute_scale = AttributeScale::ordinal;
    const auto sim = simulate_random(7, 6, 3, 1, mode, false, false);
    SamplerConfig cfg;
    cfg.iterations = 80;
    cfg.burn_in = 10;
    cfg.initial_state_regression = true;
    const PosteriorSamples s = run_chain(sim.data, mode, PriorSpec{}, cfg);
    REQUIRE(s.draws.size() == 70);
    CHECK(s.draws.back().initial.has_value());
    CHECK(s.draws.back().params.sigma2 == 1.0);
    CHECK(scalar_parameters(s.draws.back().params, mode).allFinite());
  }
  SUBCASE("missing Gaussian entries") {
    ModelMode mode;
    const auto sim = simulate_random(8, 6, 5, 1, mode);
    std::vector<Mask> masks(6, Mask::Constant(6, 6, true));
    masks[3](1, 2) = masks[3](2, 1) = false;
    masks[5](0, 4) = masks[5](4, 0) = false;
    Dataset data = sim.data;
    data.network = NetworkSeries(sim.data.network.slices(), false, masks);
    SamplerConfig cfg;
    cfg.iterations = 50;
    cfg.burn_in = 10;
    const PosteriorSamples s = run_chain(data, mode, PriorSpec{}, cfg);
    CHECK(s.draws.size() == 40);
  }
}

TEST_CASE("inconsistent configurations are rejected") {
  ModelMode mode;
  const auto sim = simulate_random(9, 5, 3, 1, mode);
  SamplerConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 10;
  CHECK_THROWS_AS(run_chain(sim.data, mode, PriorSpec{}, cfg), ValidationError);
  cfg.iterations = 20;
  cfg.latent_dim = 2;
  CHECK_THROWS_AS(run_chain(sim.data, mode, PriorSpec{}, cfg), ValidationError);
}

TEST_CASE("scalar names follow the parameter layout") {
  ModelMode mode;
  mode.directed = true;
  const McrParams th = McrParams::zeros(mode, 2, 1, 2);
  const auto names = scalar_parameter_names(th, mode);
  CHECK(names.front() == "gamma[0]");
  CHECK(std::find(names.begin(), names.end(), "alpha2") != names.end());
  CHECK(std::find(names.begin(), names.end(), "C2[1,0]") != names.end());
  CHECK(names.back() == "Sigma[1,1]");
  CHECK(static_cast<Eigen::Index>(names.size()) == scalar_parameters(th, mode).size());
}
