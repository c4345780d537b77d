#pragma once

// Latent nodal attributes: x_{i,t} unobserved, H diagonal and Sigma = I.
// The attribute full conditional below is shared with the ordinal-attribute
// sampler, which draws its scalar components one at a time.

#include <optional>
#include <span>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/random.hpp"

namespace mcr {

/// Independent N(mean, variance) prior placed on every latent entry.
struct LatentEntryPrior {
  double mean = 0.0;
  double variance = 100.0;
  bool initial_only = false;  // apply at t = 0 only (imputing a Gaussian network)

  bool applies(int t) const { return !initial_only || t == 0; }
};

/// Prior information on the attribute process that the transition equations
/// do not provide: a Gaussian anchor for x_{i,0} and, optionally, an
/// independent prior on every entry.
struct AttributeAnchor {
  bool initial = false;
  Matrix initial_mean;       // m x p
  Vector initial_variance;   // p
  std::optional<LatentEntryPrior> every_entry;

  static AttributeAnchor standard_normal(int m, int p);
  static AttributeAnchor flat() { return {}; }
};

/// Gaussian full conditional in information form: N(P^{-1} l, P^{-1}).
struct InformationForm {
  Matrix precision;
  Vector linear;

  Gaussian moments() const { return precision_to_moments(precision, linear); }
};

/// Full conditional of x_{i,t} given all other attributes, the working
/// network and the parameters. Information comes from the transition into t
/// (or the anchor at t = 0), every network transition at t+1 whose
/// homophily term involves x_{i,t}, and every attribute transition at t+1
/// whose mean involves x_{i,t} (through A for node i and through the
/// contagion matrices for the other nodes).
InformationForm attribute_full_conditional(const Panel& working, const McrParams& params, const ModelMode& mode,
                                           const Matrix& sigma_inverse, const AttributeAnchor& anchor, int i, int t);

/// Mean and covariance of the latent full conditional (Sigma = I).
Gaussian latent_full_conditional(const Panel& working, const McrParams& params, const ModelMode& mode,
                                 const AttributeAnchor& anchor, int i, int t);

/// One sweep over t ascending and i ascending within t, redrawing each x_{i,t}.
void step_latent_sweep(std::vector<Matrix>& X, std::span<const Matrix> Z, const CovariateSpec& covariates,
                       const McrParams& params, const ModelMode& mode, const AttributeAnchor& anchor, Rng& rng);

/// Starting values: per time slice, the leading p eigenvectors of the
/// centred (symmetrised) sociomatrix scaled by sqrt|lambda|, sign-matched to
/// the previous slice, plus a small jitter.
std::vector<Matrix> initialize_latent(std::span<const Matrix> network, int p, Rng& rng);

struct Alignment {
  std::vector<int> perm;      // perm[k]: source column placed at position k
  std::vector<double> signs;
};

/// Column permutation and sign pattern of draw maximising the summed
/// absolute inner product with reference across all time slices. Ties are
/// broken by the lexicographically first permutation.
Alignment best_alignment(std::span<const Matrix> reference, std::span<const Matrix> draw);
std::vector<Matrix> apply_alignment(std::span<const Matrix> trajectory, const Alignment& alignment);

}  // namespace mcr
