#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/ordinal.hpp"
#include "mcr/random.hpp"

namespace mcr {

/// Gaussian regressions for slice 0 of latent relations and latent attributes:
/// z_{ij,0} ~ N(gamma0' s_ij, sigma2), w_{ik,0} ~ N(G0_k s_i, tau2_k).
struct InitialStateParams {
  Vector gamma0;
  Matrix G0;    // p x q_node
  Vector tau2;  // p
};

struct SimConfig {
  int m = 0;
  int n = 0;  // transitions; n + 1 time points
  int p = 0;
  McrParams params;
  ModelMode mode;
  std::optional<CovariateSpec> covariates;  // saturated when absent
  /// Explicit (Y0, X0) on the latent scale. Otherwise slice 0 comes from
  /// initial_regression when given, or from iid noise around the intercepts
  /// followed by burn_in discarded steps.
  std::optional<std::pair<Matrix, Matrix>> initial_state;
  std::optional<InitialStateParams> initial_regression;
  int burn_in = 50;
  double noise_scale = 1.0;
  std::optional<Thresholds> network_cuts;   // ordinal network; default single cut at 0
  std::vector<Thresholds> attribute_cuts;   // ordinal attributes; default single cut at 0
  std::uint64_t seed = 0;
};

struct Simulation {
  Dataset data;              // observed scale (latent attributes are returned as-is)
  std::vector<Matrix> Z;     // latent relations
  std::vector<Matrix> W;     // latent attribute values
};

/// Iterates the coupled recursions. Observed ordinal values are category
/// indices 0..q-1. Throws StabilityError naming t once any |value| > 1e8.
Simulation simulate(const SimConfig& config);

struct OneStepForecast {
  Matrix network;                          // E[y_{ij,t+1}] (latent scale when ordinal)
  Matrix attributes;                       // E[x_{i,t+1}]
  std::vector<Matrix> network_probabilities;  // per category, ordinal network with cuts
};

OneStepForecast forecast_one_step(const McrParams& params, const ModelMode& mode, const CovariateSpec& covariates,
                                  const Matrix& Y, const Matrix& X, const Thresholds* network_cuts = nullptr);

/// Moderate, stable parameters for quick simulations.
McrParams default_params(const ModelMode& mode, const CovariateSpec& covariates, int p);

}  // namespace mcr
