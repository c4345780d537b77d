// Serial vs OpenMP accumulation of the normal equations.

#include <benchmark/benchmark.h>

#include "mcr/normal_equations.hpp"
#include "mcr/simulate.hpp"

namespace {

mcr::Simulation make_panel(int m, int n, int p, bool directed) {
  mcr::SimConfig c;
  c.m = m;
  c.n = n;
  c.p = p;
  c.mode.directed = directed;
  c.covariates = mcr::CovariateSpec(m, directed, mcr::Matrix::Ones(static_cast<Eigen::Index>(m) * m, 1),
                                    mcr::Matrix::Ones(m, 1));
  c.params = mcr::default_params(c.mode, *c.covariates, p);
  c.seed = 11;
  return mcr::simulate(c);
}

template <mcr::Execution E>
void network(benchmark::State& state) {
  const auto sim = make_panel(static_cast<int>(state.range(0)), 64, 2, true);
  mcr::ModelMode mode;
  mode.directed = true;
  const mcr::Panel panel = sim.data.panel();
  for (auto _ : state) benchmark::DoNotOptimize(mcr::accumulate_network_normal_equations(panel, mode, E));
}

template <mcr::Execution E>
void attributes(benchmark::State& state) {
  const auto sim = make_panel(static_cast<int>(state.range(0)), 64, 2, true);
  mcr::ModelMode mode;
  mode.directed = true;
  const mcr::Panel panel = sim.data.panel();
  for (auto _ : state) benchmark::DoNotOptimize(mcr::accumulate_attribute_normal_equations(panel, mode, E));
}

}  // namespace

BENCHMARK(network<mcr::Execution::serial>)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(network<mcr::Execution::parallel>)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(attributes<mcr::Execution::serial>)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(attributes<mcr::Execution::parallel>)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
