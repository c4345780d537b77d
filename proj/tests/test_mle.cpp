#include <doctest.h>
#include <omp.h>

#include "helpers.hpp"
#include "mcr/mle.hpp"
#include "oracles.hpp"

using namespace mcr;
using testing_support::max_abs_diff;

namespace {

double coefficient_gap(const MleFit& fit, const oracle::Coefficients& ref, const ModelMode& mode) {
  double gap = max_abs_diff(fit.params.gamma, ref.gamma);
  gap = std::max(gap, std::abs(fit.params.alpha1 - ref.alpha1));
  if (mode.directed) gap = std::max(gap, std::abs(*fit.params.alpha2 - ref.alpha2));
  gap = std::max({gap, max_abs_diff(fit.params.H, ref.H), max_abs_diff(fit.params.Gamma, ref.Gamma),
                  max_abs_diff(fit.params.A, ref.A), max_abs_diff(fit.params.C1, ref.C1)});
  if (mode.directed) gap = std::max(gap, max_abs_diff(*fit.params.C2, ref.C2));
  return gap;
}

}  // namespace

TEST_CASE("MLE matches stacked least squares") {
  int k = 0;
  for (bool directed : {false, true})
    for (bool sat : {false, true})
      for (int p : {1, 2}) {
        ModelMode mode;
        mode.directed = directed;
        const auto sim = testing_support::simulate_random(100 + k++, 5, 4, p, mode, sat, sat);
        const MleFit fit = fit_mle(sim.data, mode);
        const auto ref = oracle::stacked_least_squares(sim.data, mode);
        CHECK(coefficient_gap(fit, ref, mode) < 1e-8);
      }
}

TEST_CASE("nested submodels match the oracle") {
  ModelMode mode;
  mode.directed = true;
  const auto sim = testing_support::simulate_random(7, 6, 4, 2, mode);
  for (bool ar : {false, true})
    for (bool con : {false, true}) {
      ModelMode sub = mode;
      sub.autoregression = ar;
      sub.contagion = con;
      const MleFit fit = fit_mle(sim.data, sub);
      CHECK(coefficient_gap(fit, oracle::stacked_least_squares(sim.data, sub), sub) < 1e-8);
    }
}

TEST_CASE("serial and parallel accumulation agree for any thread count") {
  ModelMode mode;
  mode.directed = true;
  const auto sim = testing_support::simulate_random(8, 7, 40, 2, mode, false, false);
  const Panel panel = sim.data.panel();
  const NormalEquations serial = accumulate_network_normal_equations(panel, mode, Execution::serial);
  CHECK(serial.count == 40 * 42);
  std::optional<NormalEquations> first;
  for (int threads : {1, 2, 3}) {
    omp_set_num_threads(threads);
    const NormalEquations par = accumulate_network_normal_equations(panel, mode, Execution::parallel);
    CHECK(max_abs_diff(par.Q, serial.Q) < 1e-9 * serial.Q.cwiseAbs().maxCoeff());
    if (!first) first = par;
    else {
      CHECK(par.Q == first->Q);  // bit-identical regardless of threads
      CHECK(par.L == first->L);
    }
    const NormalEquations a = accumulate_attribute_normal_equations(panel, mode, Execution::parallel);
    const NormalEquations b = accumulate_attribute_normal_equations(panel, mode, Execution::serial);
    CHECK(max_abs_diff(a.L, b.L) < 1e-9 * (1.0 + b.L.cwiseAbs().maxCoeff()));
  }
  omp_set_num_threads(1);
}

TEST_CASE("residual cross product equals the direct residual sum of squares") {
  ModelMode mode;
  const auto sim = testing_support::simulate_random(9, 6, 5, 2, mode);
  const MleFit fit = fit_mle(sim.data, mode);
  const Panel panel = sim.data.panel();
  double rss = 0.0;
  for (int t = 1; t < panel.time_points(); ++t)
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        const double e = panel.y(t, i, j) - network_mean(panel, fit.params, mode, i, j, t);
        rss += e * e;
      }
  CHECK(fit.rss_network == doctest::Approx(rss).epsilon(1e-9));
  CHECK(fit.params.sigma2 == doctest::Approx(rss / fit.dyad_count).epsilon(1e-12));
}

TEST_CASE("rank deficiency is reported, pseudo-inverse is opt-in") {
  ModelMode mode;
  const auto sim = testing_support::simulate_random(10, 4, 1, 2, mode);  // one transition: too few rows
  CHECK_THROWS_AS(fit_mle(sim.data, mode), RankDeficiencyError);
  SolveOptions opt;
  opt.pseudo_inverse_fallback = true;
  CHECK_NOTHROW(fit_mle(sim.data, mode, opt));
}

TEST_CASE("rank deficiency names the offending columns") {
  Matrix Q = Matrix::Identity(3, 3);
  Q(2, 2) = 0.0;
  double cond = 0.0;
  const std::vector<std::string> names{"a", "b", "c"};
  try {
    guarded_solve(Q, Vector::Ones(3), SolveOptions{}, names, cond);
    FAIL("expected an error");
  } catch (const RankDeficiencyError& e) {
    CHECK(std::string(e.what()).ends_with(" c"));
  }
}
