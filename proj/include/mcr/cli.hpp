#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/diagnostics.hpp"
#include "mcr/gibbs.hpp"

namespace mcr {

enum class Subcommand { simulate, fit_mle, fit_bayes, diagnose, forecast_study };

struct RunConfig {
  Subcommand subcommand = Subcommand::simulate;
  std::optional<int> threads;

  // inputs
  std::string network_path;
  std::string attributes_path;
  std::string dyad_covariates_path;
  std::string node_covariates_path;
  std::string params_path;
  std::string prior_path;
  std::string samples_path;
  bool dense_zero = false;

  ModelMode mode;
  int latent_dim = 0;

  // simulate
  int m = 0;
  int n = 0;
  int p = 0;
  int burn_in_steps = 50;
  std::string out_prefix = "sim";
  std::vector<double> network_cuts;
  std::vector<double> attribute_cuts;

  // fitting
  SolveOptions solve;
  SamplerConfig sampler;
  std::vector<double> network_levels;
  std::vector<double> attribute_levels;
  std::string export_latent_path;

  // diagnose / forecast-study
  std::vector<double> probs = kDefaultProbs;
  std::vector<int> holdouts;
  ForecastMethod method = ForecastMethod::mle;

  std::uint64_t seed = 1;
  std::string out_path;
};

/// Parses and validates a command line. Throws ValidationError listing every
/// violation found, one per line.
RunConfig parse_and_validate(int argc, const char* const* argv);

/// Reads and checks the files named by the config; prints a one-line summary
/// to stderr.
Dataset load_dataset(const RunConfig& config, bool echo = true);

void run_simulate(const RunConfig& config);
void run_fit_mle(const RunConfig& config);
void run_fit_bayes(const RunConfig& config);
void run_diagnose(const RunConfig& config);
void run_forecast_study(const RunConfig& config);

/// Full CLI: parse, dispatch, map errors to exit codes
/// (0 ok, 2 validation, 3 numerical or stability, 4 I/O).
int cli_main(int argc, const char* const* argv);

}  // namespace mcr
