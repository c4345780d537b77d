// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. Pass criterion numbers as arguments to run a subset.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conditional_checks.hpp"
#include "helpers.hpp"
#include "mcr/diagnostics.hpp"
#include "mcr/gibbs.hpp"
#include "mcr/mle.hpp"
#include "mcr/simulate.hpp"
#include "oracles.hpp"

using namespace mcr;
using testing_support::max_abs_diff;
using testing_support::random_covariates;
using testing_support::random_matrix;
using testing_support::random_params;

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double coefficient_gap(const McrParams& fit, const oracle::Coefficients& ref, const ModelMode& mode) {
  double gap = max_abs_diff(fit.gamma, ref.gamma);
  gap = std::max(gap, std::abs(fit.alpha1 - ref.alpha1));
  if (mode.directed) gap = std::max(gap, std::abs(*fit.alpha2 - ref.alpha2));
  gap = std::max({gap, max_abs_diff(fit.H, ref.H), max_abs_diff(fit.Gamma, ref.Gamma), max_abs_diff(fit.A, ref.A),
                  max_abs_diff(fit.C1, ref.C1)});
  if (mode.directed) gap = std::max(gap, max_abs_diff(*fit.C2, ref.C2));
  return gap;
}

double param_gap(const McrParams& a, const McrParams& b, const ModelMode& mode) {
  return std::max(max_abs_diff(pack_beta(a, mode), pack_beta(b, mode)),
                  max_abs_diff(pack_B(a, mode), pack_B(b, mode)));
}

// 1. MLE against stacked least squares
Outcome mle_oracle() {
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 50; ++k) {
    Rng pick(1000 + k, 3);
    ModelMode mode;
    mode.directed = k % 2 == 1;
    const int m = 4 + static_cast<int>(pick.uniform() * 3);
    const int n = 3 + static_cast<int>(pick.uniform() * 3);
    const int p = 1 + static_cast<int>(pick.uniform() * 2);
    const bool sat_dyads = pick.uniform() < 0.5;
    const bool sat_nodes = pick.uniform() < 0.5;
    try {
      const auto sim = testing_support::simulate_random(2000 + k, m, n, p, mode, sat_dyads, sat_nodes);
      const MleFit fit = fit_mle(sim.data, mode);
      const double gap = coefficient_gap(fit.params, oracle::stacked_least_squares(sim.data, mode), mode);
      worst = std::max(worst, gap);
      if (!(gap < 1e-8)) ++failures;
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "  instance " << k << ": " << e.what() << '\n';
    }
  }
  return {failures == 0, "50 instances, max gap " + fmt("%.2e", worst) + ", failures " + std::to_string(failures)};
}

// 2. noiseless recovery
Outcome zero_noise() {
  double worst = 0.0;
  for (bool directed : {false, true})
    for (int rep = 0; rep < 10; ++rep) {
      Rng rng(300 + rep, directed ? 2 : 1);
      ModelMode mode;
      mode.directed = directed;
      SimConfig c;
      c.m = 6;
      c.n = 5;
      c.p = 2;
      c.mode = mode;
      c.covariates = random_covariates(rng, 6, directed, false, false);
      c.params = random_params(rng, mode, *c.covariates, 2);
      c.noise_scale = 0.0;
      Matrix Y = random_matrix(rng, 6, 6, 1.0);
      if (!directed) Y = (Y + Y.transpose()).eval();
      c.initial_state = std::make_pair(Y, random_matrix(rng, 6, 2, 1.0));
      const Simulation sim = simulate(c);
      const MleFit fit = fit_mle(sim.data, mode);
      worst = std::max(worst, param_gap(fit.params, c.params, mode));
    }
  return {worst < 1e-8, "20 instances, max gap " + fmt("%.2e", worst)};
}

// 3. coverage of 3-SE intervals at m = 30, n = 200, p = 2
Outcome recovery_at_scale() {
  const int m = 30, n = 200, p = 2;
  ModelMode mode;
  mode.directed = true;
  Rng setup(31, 0);
  const CovariateSpec cov = random_covariates(setup, m, true, false, false);
  McrParams th = McrParams::zeros(mode, cov.dyad_dim(), cov.node_dim(), p);
  th.gamma << 0.2, 0.3;
  th.alpha1 = 0.5;
  th.alpha2 = 0.15;
  th.H << 0.1, 0.04, -0.03, 0.08;
  th.Gamma << 0.0, 0.4, 0.0, -0.3;
  th.A << 0.5, 0.1, -0.05, 0.4;
  th.C1 << 0.004, 0.001, 0.0, 0.003;
  *th.C2 << 0.002, 0.0, 0.001, -0.002;
  th.Sigma << 1.0, 0.3, 0.3, 0.8;
  th.sigma2 = 1.0;

  const Vector beta_true = pack_beta(th, mode);
  const Matrix B_true = pack_B(th, mode);
  const int q = cov.dyad_dim();
  const int qn = cov.node_dim();
  Vector beta_hits = Vector::Zero(beta_true.size() - q);
  Matrix B_hits = Matrix::Zero(p, B_true.cols() - qn);
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    SimConfig c;
    c.m = m;
    c.n = n;
    c.p = p;
    c.mode = mode;
    c.covariates = cov;
    c.params = th;
    c.seed = 3000 + r;
    const Simulation sim = simulate(c);
    const MleFit fit = fit_mle(sim.data, mode);
    const Vector beta = pack_beta(fit.params, mode);
    const Matrix B = pack_B(fit.params, mode);
    for (int k = q; k < beta.size(); ++k)
      if (std::abs(beta(k) - beta_true(k)) <= 3.0 * fit.beta_standard_errors(k)) beta_hits(k - q) += 1;
    for (int a = 0; a < p; ++a)
      for (int k = qn; k < B.cols(); ++k)
        if (std::abs(B(a, k) - B_true(a, k)) <= 3.0 * fit.B_standard_errors(a, k)) B_hits(a, k - qn) += 1;
  }
  const double lowest = std::min(beta_hits.minCoeff(), B_hits.minCoeff()) / reps;
  return {lowest >= 0.95, std::to_string(beta_hits.size() + B_hits.size()) + " coefficients, lowest coverage " +
                              fmt("%.2f", lowest)};
}

// 4. flat-prior posterior means against the MLE
Outcome flat_prior() {
  ModelMode mode;
  const auto sim = testing_support::simulate_random(44, 15, 40, 2, mode, true, true);
  const MleFit fit = fit_mle(sim.data, mode);
  PriorSpec prior;
  prior.beta_variance = 1e6;
  prior.b_variance = 1e6;
  SamplerConfig cfg;
  cfg.iterations = 20000;
  cfg.burn_in = 2000;
  cfg.seed = 4;
  const PosteriorSamples s = run_chain(sim.data, mode, prior, cfg);

  const int d_beta = static_cast<int>(pack_beta(fit.params, mode).size());
  const int n_draws = static_cast<int>(s.draws.size());
  Matrix draws(n_draws, d_beta + pack_B(fit.params, mode).size());
  for (int k = 0; k < n_draws; ++k) {
    const Matrix B = pack_B(s.draws[k].params, mode);
    draws.row(k) << pack_beta(s.draws[k].params, mode).transpose(),
        Eigen::Map<const Vector>(B.data(), B.size()).transpose();
  }
  const Matrix B_hat = pack_B(fit.params, mode);
  Vector target(draws.cols());
  target << pack_beta(fit.params, mode), Eigen::Map<const Vector>(B_hat.data(), B_hat.size());

  int within = 0;
  double worst = 0.0;
  for (int c = 0; c < draws.cols(); ++c) {
    const Vector col = draws.col(c);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / (n_draws - 1));
    const double ess = effective_sample_size(std::span<const double>(col.data(), col.size())).value;
    const double z = std::abs(mean - target(c)) / (sd / std::sqrt(ess));
    worst = std::max(worst, z);
    if (z <= 2.0) ++within;
  }
  const double share = static_cast<double>(within) / draws.cols();
  return {share >= 0.90 && worst <= 4.5, std::to_string(draws.cols()) + " coefficients, " + fmt("%.3f", share) +
                                             " within 2 MC-SE, max |z| " + fmt("%.2f", worst)};
}

// 5. latent-attribute and probit conditionals against joint conditioning
Outcome conditional_oracle() {
  using namespace testing_support;
  double worst = 0.0;
  int cases = 0;
  for (int seed = 0; seed < 12; ++seed)
    for (bool directed : {false, true}) {
      const int m = 3 + seed % 2;
      const ToyState lat = random_toy(500 + seed, m, 4, 1, directed, true, false);
      worst = std::max(worst, attribute_conditional_gap(lat, true, Matrix::Identity(1, 1)));
      worst = std::max(worst, attribute_conditional_gap(lat, false, Matrix::Identity(1, 1)));
      const ToyState ord = random_toy(700 + seed, m, 4, 1, directed, false, true);
      LatentEntryPrior prior;
      Rng rng(seed, 5);
      const Vector g0 = random_matrix(rng, static_cast<int>(ord.params.gamma.size()), 1, 0.5);
      worst = std::max(worst, relation_conditional_gap(ord, prior, std::nullopt, Matrix::Identity(1, 1)));
      worst = std::max(worst, relation_conditional_gap(ord, prior, g0, Matrix::Identity(1, 1)));
      cases += 4;
    }
  return {worst < 1e-8, std::to_string(cases) + " configurations, max gap " + fmt("%.2e", worst)};
}

// 6. credible-interval coverage for a binary directed probit network
Outcome ordinal_calibration() {
  const int m = 25, reps = 50;
  ModelMode mode;
  mode.directed = true;
  mode.network_scale = NetworkScale::ordinal;
  mode.attribute_scale = AttributeScale::ordinal;

  Rng setup(61, 0);
  Vector group(m);
  for (int i = 0; i < m; ++i) group(i) = setup.uniform() < 0.5 ? 1.0 : 0.0;
  Matrix S = Matrix::Zero(static_cast<Eigen::Index>(m) * m, 3);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) S.row(i + m * j) << group(i), group(j), group(i) == group(j) ? 1.0 : 0.0;
  const CovariateSpec cov(m, true, S, Matrix(group));

  McrParams th = McrParams::zeros(mode, 3, 1, 1);
  th.gamma << -0.2, -0.2, 0.3;
  th.alpha1 = 0.5;
  th.alpha2 = 0.2;
  th.H(0, 0) = 0.3;
  th.Gamma(0, 0) = 0.4;
  th.A(0, 0) = 0.6;
  th.C1(0, 0) = 0.02;
  (*th.C2)(0, 0) = 0.01;
  InitialStateParams init;
  init.gamma0 = Vector::Constant(3, 0.0);
  init.G0 = Matrix::Constant(1, 1, 0.5);
  init.tau2 = Vector::Ones(1);

  const double truth[4] = {th.alpha1, *th.alpha2, th.H(0, 0), th.A(0, 0)};
  const char* names[4] = {"alpha1", "alpha2", "h", "a"};
  int hits[4] = {0, 0, 0, 0};
  for (int r = 0; r < reps; ++r) {
    SimConfig c;
    c.m = m;
    c.n = 3;
    c.p = 1;
    c.mode = mode;
    c.covariates = cov;
    c.params = th;
    c.initial_regression = init;
    c.network_cuts = Thresholds{{-kInf, 0.0, kInf}};
    c.attribute_cuts = {Thresholds{{-kInf, -1.2, -0.4, 0.4, 1.2, kInf}}};
    c.seed = 6000 + r;
    const Simulation sim = simulate(c);

    SamplerConfig cfg;
    cfg.iterations = 12000;
    cfg.burn_in = 4000;
    cfg.seed = 60 + r;
    cfg.initial_state_regression = true;
    cfg.ordinal_mode = OrdinalMode::threshold;
    cfg.network_levels = OrdinalLevels{{0.0, 1.0}};
    cfg.attribute_levels = {OrdinalLevels{{0.0, 1.0, 2.0, 3.0, 4.0}}};
    const PosteriorSamples s = fit_ordinal(sim.data, mode, PriorSpec{}, cfg);
    std::vector<double> v[4];
    for (const Draw& d : s.draws) {
      v[0].push_back(d.params.alpha1);
      v[1].push_back(*d.params.alpha2);
      v[2].push_back(d.params.H(0, 0));
      v[3].push_back(d.params.A(0, 0));
    }
    for (int k = 0; k < 4; ++k)
      if (quantile(v[k], 0.025) <= truth[k] && truth[k] <= quantile(v[k], 0.975)) ++hits[k];
  }
  bool pass = true;
  std::string detail = std::to_string(reps) + " replicates, coverage";
  for (int k = 0; k < 4; ++k) {
    const double cover = static_cast<double>(hits[k]) / reps;
    pass = pass && cover >= 0.90;
    detail += std::string(" ") + names[k] + "=" + fmt("%.2f", cover);
  }
  return {pass, detail};
}

// 7. truncated normal moments
Outcome truncated_moments() {
  struct Case {
    double mu, sd, a, b;
  };
  const Case cases[3] = {{0.0, 1.0, -1.0, 1.0}, {0.5, 2.0, 1.5, kInf}, {0.0, 1.0, -kInf, -7.0}};
  const int N = 100000;
  bool pass = true;
  double worst = 0.0;
  Rng rng(7);
  for (const Case& c : cases) {
    std::vector<double> x(N);
    for (double& v : x) v = truncated_normal(rng, c.mu, c.sd, c.a, c.b);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= N;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
      const double e = (v - mean) * (v - mean);
      m2 += e;
      m4 += e * e;
    }
    m2 /= N;
    m4 /= N;
    const auto [mean_ref, var_ref] = oracle::truncated_moments(c.mu, c.sd, c.a, c.b);
    const double z_mean = std::abs(mean - mean_ref) / std::sqrt(m2 / N);
    const double z_var = std::abs(m2 - var_ref) / std::sqrt((m4 - m2 * m2) / N);
    worst = std::max({worst, z_mean, z_var});
    pass = pass && z_mean <= 3.0 && z_var <= 3.0;
  }
  return {pass, "3 intervals, max |z| " + fmt("%.2f", worst)};
}

// 8. ESS of an AR(1) chain
Outcome ess_check() {
  const int N = 100000;
  const double rho = 0.5;
  Rng rng(8);
  std::vector<double> x(N);
  x[0] = rng.normal() / std::sqrt(1.0 - rho * rho);
  for (int k = 1; k < N; ++k) x[k] = rho * x[k - 1] + rng.normal();
  const double ess = effective_sample_size(x).value;
  const double target = N / 3.0;
  return {std::abs(ess - target) <= 0.1 * target, "ESS " + fmt("%.0f", ess) + " vs " + fmt("%.0f", target)};
}

// 9. full model out-forecasts the model without autoregression
Outcome forecast_direction() {
  int wins = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    ModelMode mode;
    Rng rng(900 + r, 0);
    SimConfig c;
    c.m = 15;
    c.n = 10;
    c.p = 1;
    c.mode = mode;
    c.covariates = random_covariates(rng, c.m, false, false, false);
    c.params = McrParams::zeros(mode, 2, 2, 1);
    c.params.gamma << 0.1, 0.2;
    c.params.alpha1 = 0.8;
    c.params.H(0, 0) = 0.05;
    c.params.Gamma << 0.0, 0.5;
    c.params.A(0, 0) = 0.5;
    c.params.C1(0, 0) = 0.01;
    c.seed = 9000 + r;
    const Simulation sim = simulate(c);
    const ForecastComparison cmp = forecast_study(sim.data, mode, {8, 9, 10}, ForecastStudyOptions{});
    if (cmp.average(0) < cmp.average(2)) ++wins;
  }
  return {wins >= 18, std::to_string(wins) + " of " + std::to_string(reps) + " replicates"};
}

// 10. CLI pipelines give identical bytes across runs and thread counts
int run(const fs::path& dir, const std::string& args, const std::string& tag) {
  const std::string cmd = "cd '" + dir.string() + "' && '" MCR_CLI_PATH "' " + args + " >" + tag + ".out 2>" + tag +
                          ".err";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> pipeline = {
      {"sim", "simulate --m 12 --n 8 --p 2 --directed --seed 11 --out-prefix g"},
      {"mle", "fit-mle --network g_network.csv --attributes g_attributes.csv --directed --out mle.json"},
      {"bayes", "fit-bayes --network g_network.csv --attributes g_attributes.csv --directed --iters 400 --burn-in 100 "
                "--chains 2 --seed 3 --out samples.ndjson"},
      {"diag", "diagnose --samples samples.ndjson --network g_network.csv --attributes g_attributes.csv --directed "
               "--out diagnose.json"},
      {"fc", "forecast-study --network g_network.csv --attributes g_attributes.csv --directed --holdouts 6,7,8 --seed 5 --out fc.json"},
      {"osim", "simulate --m 10 --n 4 --p 1 --network-scale ordinal --attribute-scale ordinal --attribute-cuts -0.5,0.5 "
               "--seed 12 --out-prefix o"},
      {"obayes", "fit-bayes --network o_network.csv --attributes o_attributes.csv --network-scale ordinal "
                 "--attribute-scale ordinal --iters 300 --burn-in 50 --chains 2 --seed 4 --out o_samples.ndjson"},
      {"ofc", "forecast-study --network o_network.csv --network-scale ordinal --method bayes --holdouts 3,4 --seed 6 "
              "--out o_fc.json"},
  };
  const fs::path root = fs::temp_directory_path() / "mcr_acceptance_determinism";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  for (const char* threads : {"1", "2"}) {
    const fs::path d = root / (std::string("threads") + threads);
    fs::create_directories(d);
    for (const auto& [tag, args] : pipeline) {
      const int rc = run(d, std::string("--threads ") + threads + " " + args, tag);
      if (rc != 0) return {false, "step '" + tag + "' exited with status " + std::to_string(rc)};
    }
    dirs.push_back(d);
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const fs::path other = dirs[1] / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
      return {false, entry.path().filename().string() + " differs between runs"};
    ++files;
  }
  return {true, std::to_string(files) + " files byte-identical with 1 and 2 threads"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 = no limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "MLE oracle equivalence", 10, mle_oracle},
      {2, "zero-noise recovery", 5, zero_noise},
      {3, "parameter recovery at scale", 300, recovery_at_scale},
      {4, "flat-prior concordance", 120, flat_prior},
      {5, "conditional-oracle equivalence", 30, conditional_oracle},
      {6, "ordinal calibration", 1800, ordinal_calibration},
      {7, "truncated-normal moments", 5, truncated_moments},
      {8, "ESS analytic check", 0, ess_check},
      {9, "forecast-study direction", 0, forecast_direction},
      {10, "end-to-end determinism", 0, determinism},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    if (!in_time) out.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.name << " (" << out.detail
              << ", " << fmt("%.1f", secs) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
