#pragma once

// Gibbs sampler for the coevolution model. Each iteration updates
// beta -> B -> sigma2 -> (Sigma | latent X) -> latent relations -> network
// cuts -> latent ordinal attributes and their cuts -> slice-0 regressions.
// Blocks that do not apply to the mode are skipped.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/latent.hpp"
#include "mcr/normal_equations.hpp"
#include "mcr/ordinal.hpp"
#include "mcr/random.hpp"
#include "mcr/simulate.hpp"

namespace mcr {

struct PriorSpec {
  std::optional<Matrix> V_beta;   // default beta_variance * I
  std::optional<Matrix> V_b;      // default b_variance * I, over vec(B) (column-major)
  double beta_variance = 100.0;
  double b_variance = 100.0;
  double nu0 = 1.0;
  double sigma0_sq = 1.0;
  std::optional<Matrix> S0;       // default I
  std::optional<double> eta0;     // default p + 2
  LatentEntryPrior latent;        // prior on latent relations
  double cut_mean = 0.0;
  double cut_variance = 100.0;
  bool flat_initial_latent = false;    // drop the N(0, I) anchor on latent x_{i,0}
  bool attribute_entry_prior = false;  // N(latent.mean, latent.variance) on every ordinal w
  double initial_coefficient_variance = 100.0;

  Matrix beta_covariance(int d) const;
  Matrix b_covariance(int d) const;
  Matrix S0_or_default(int p) const;
  double eta0_or_default(int p) const;
  void validate(int d_beta, int d_b, int p) const;
};

enum class ChainInit { mle, prior_draw };

struct SamplerConfig {
  int iterations = 2000;
  int burn_in = 500;
  int thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  ChainInit init = ChainInit::mle;
  int latent_dim = 0;                      // > 0 selects latent attributes
  OrdinalMode ordinal_mode = OrdinalMode::automatic;
  std::optional<OrdinalLevels> network_levels;
  std::vector<OrdinalLevels> attribute_levels;
  bool initial_state_regression = false;
  bool store_latent_draws = false;
  bool forecast = false;                   // accumulate the mean one-step forecast from the last slice

  void validate() const;
  int retained() const { return (iterations - burn_in) / thin; }
};

struct Draw {
  int chain = 0;
  int iteration = 0;
  McrParams params;
  std::optional<InitialStateParams> initial;
  std::vector<double> network_cuts;
  std::vector<std::vector<double>> attribute_cuts;
  std::vector<Matrix> latent;  // aligned trajectory when stored
};

struct PosteriorSamples {
  ModelMode mode;
  int iterations = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  int chains = 1;
  std::string moves = "gibbs";  // every update is an exact full-conditional draw
  std::vector<Draw> draws;
  /// Posterior-mean working attribute trajectories (aligned in latent mode;
  /// latent scale for ordinal attributes). Empty for observed attributes.
  std::vector<Matrix> attribute_mean;
  std::optional<OneStepForecast> forecast;

  McrParams posterior_mean() const;
};

// --- individual blocks -----------------------------------------------------------

/// beta | rest ~ N(P^{-1} l / sigma2, P^{-1}) with P = V_beta^{-1} + Q / sigma2.
InformationForm beta_conditional(const NormalEquations& ne, double sigma2, const Matrix& V_beta_inverse);
Vector step_beta(const NormalEquations& ne, double sigma2, const Matrix& V_beta_inverse, Rng& rng);

/// vec(B) | rest with precision V_b^{-1} + Q kron Sigma^{-1} and linear term
/// vec(Sigma^{-1} L); vec stacks the columns of the p x d matrix B.
InformationForm b_conditional(const NormalEquations& ne, const Matrix& Sigma_inverse, const Matrix& V_b_inverse);
Matrix step_b(const NormalEquations& ne, const Matrix& Sigma_inverse, const Matrix& V_b_inverse, Rng& rng);

/// 1/sigma2 ~ Gamma((nu0 + count) / 2, (nu0 sigma0^2 + rss) / 2).
double step_sigma2(double rss, long count, const PriorSpec& prior, Rng& rng);
/// Sigma^{-1} ~ Wishart((S0 + rss)^{-1}, eta0 + count); returns Sigma.
Matrix step_Sigma(const Matrix& rss, long count, const PriorSpec& prior, Rng& rng);

/// Runs config.chains chains (in parallel when threads allow) and returns the
/// pooled retained draws ordered by chain then iteration.
PosteriorSamples run_chain(const Dataset& data, const ModelMode& mode, const PriorSpec& prior,
                           const SamplerConfig& config);
/// Same sampler; kept as the entry point for ordinal data.
PosteriorSamples fit_ordinal(const Dataset& data, const ModelMode& mode, const PriorSpec& prior,
                             const SamplerConfig& config);

/// Post-hoc alignment of stored latent trajectories: every draw is permuted
/// and sign-flipped onto the first draw, parameters transformed to match.
void align_latent_draws(PosteriorSamples& samples);

/// Names and values of every scalar parameter in a fixed order.
std::vector<std::string> scalar_parameter_names(const McrParams& params, const ModelMode& mode);
Vector scalar_parameters(const McrParams& params, const ModelMode& mode);

}  // namespace mcr
