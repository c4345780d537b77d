#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/gibbs.hpp"
#include "mcr/mle.hpp"

namespace mcr {

struct EssResult {
  double value = 0.0;
  bool degenerate = false;  // constant chain; value is N
};

/// N / (1 + 2 sum rho_k), autocorrelations summed in adjacent pairs until the
/// first non-positive pair (initial positive sequence). Clamped to N.
EssResult effective_sample_size(std::span<const double> chain);

/// Linear-interpolation quantile of unsorted values: h = (N - 1) prob.
double quantile(std::span<const double> values, double prob);

struct QuantileTable {
  std::vector<std::string> names;
  std::vector<double> probs;
  Matrix values;  // names x probs
};

inline const std::vector<double> kDefaultProbs{0.025, 0.5, 0.975};

/// draws: one row per draw, one column per scalar parameter.
QuantileTable posterior_quantiles(const Matrix& draws, std::vector<std::string> names,
                                  std::vector<double> probs = kDefaultProbs);
QuantileTable posterior_quantiles(const PosteriorSamples& samples, std::vector<double> probs = kDefaultProbs);
/// Draw matrix of scalar_parameters() for every draw.
Matrix draw_matrix(const PosteriorSamples& samples);

struct TermShares {
  double intercept = 0.0;
  double autoregressive = 0.0;
  double coupling = 0.0;  // homophily (network) or contagion (attributes)
  double error = 0.0;

  double total() const { return intercept + autoregressive + coupling + error; }
};

struct DecompositionReport {
  TermShares network;
  std::optional<TermShares> attributes;
};

/// Raw squared mean components and residuals per transition, as percentages
/// of their total at that transition, then averaged over transitions.
DecompositionReport sum_of_squares_decomposition(const Panel& data, const McrParams& params, const ModelMode& mode);

enum class ForecastMethod { mle, bayes };
ForecastMethod parse_forecast_method(const std::string& s);
std::string to_string(ForecastMethod m);

inline constexpr int kSubmodels = 4;
/// full, without contagion, without autoregression, without either.
ModelMode submodel(const ModelMode& mode, int which);
std::string submodel_name(int which);

struct ForecastComparison {
  std::vector<int> holdouts;
  std::string score;    // "squared_error" or "brier"
  Matrix errors;        // holdouts x 4 submodels
  Vector average;       // per submodel
  Vector relative;      // percent difference from the full model
};

struct ForecastStudyOptions {
  ForecastMethod method = ForecastMethod::mle;
  PriorSpec prior;
  SamplerConfig sampler;
  SolveOptions solve;
};

/// For every holdout t*, fits each submodel on slices 0..t*-1 and scores the
/// one-step forecast of slice t*. Gaussian networks are scored by squared
/// error; ordinal networks by the Brier score of the category probabilities.
ForecastComparison forecast_study(const Dataset& data, const ModelMode& mode, const std::vector<int>& holdouts,
                                  const ForecastStudyOptions& options);

/// (106.8, 100) -> "+6.8% worse"; (97, 100) -> "-3.0% better".
std::string format_relative(double value, double baseline);

}  // namespace mcr
