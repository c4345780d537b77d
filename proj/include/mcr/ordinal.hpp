#pragma once

// Probit extensions: observed ordinal values are non-decreasing step
// functions of latent Gaussian values that follow the coevolution model.
// Two ways of handling the step function are supported: explicit thresholds
// with a normal prior, or the rank likelihood, which only uses the ordering
// constraints between latent values of different categories.

#include <limits>
#include <optional>
#include <span>
#include <set>
#include <utility>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/latent.hpp"
#include "mcr/random.hpp"

namespace mcr {

enum class OrdinalMode { automatic, rank, threshold };
OrdinalMode parse_ordinal_mode(const std::string& s);
std::string to_string(OrdinalMode mode);
/// automatic resolves to threshold for q <= 10 categories, rank otherwise.
OrdinalMode resolve_ordinal_mode(OrdinalMode mode, int categories);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cut vector h_0 = -inf < h_1 < ... < h_{q-1} < h_q = +inf; category c
/// occupies (h_c, h_{c+1}].
struct Thresholds {
  std::vector<double> cuts;

  int categories() const { return static_cast<int>(cuts.size()) - 1; }
  std::pair<double, double> interval(int category) const { return {cuts[category], cuts[category + 1]}; }
  int category_of(double z) const;
  /// Cuts at normal quantiles of the cumulative category proportions.
  static Thresholds from_proportions(std::span<const long> counts);
  bool strictly_increasing() const;
};

/// Maps observed ordinal values onto category indices 0..q-1.
struct OrdinalLevels {
  std::vector<double> levels;  // sorted distinct values

  int categories() const { return static_cast<int>(levels.size()); }
  int index_of(double value) const;  // throws on unknown value
};

/// Category index of every network entry (-1 for diagonal and missing).
struct NetworkCoding {
  OrdinalLevels levels;
  std::vector<Eigen::MatrixXi> classes;
  bool directed = false;

  static NetworkCoding build(const NetworkSeries& network, std::optional<OrdinalLevels> levels = std::nullopt);
  std::vector<long> class_counts() const;
};

/// Category index of every attribute entry, per attribute k.
struct AttributeCoding {
  std::vector<OrdinalLevels> levels;          // per attribute
  std::vector<Eigen::MatrixXi> classes;       // per t: m x p

  static AttributeCoding build(const AttributeSeries& attributes, const std::vector<OrdinalLevels>& levels = {});
  std::vector<long> class_counts(int k) const;
};

/// Sorted latent values per category, kept in sync with the working tensor so
/// that rank bounds are O(log N) instead of rescans.
class RankIndex {
 public:
  explicit RankIndex(int categories) : members_(static_cast<std::size_t>(categories)) {}
  void insert(int category, double value) { members_[category].insert(value); }
  void replace(int category, double old_value, double new_value);
  /// (max of the nearest non-empty lower category, min of the nearest
  /// non-empty higher category); infinite when no such category exists.
  std::pair<double, double> bounds(int category) const;
  std::pair<double, double> extrema(int category) const;  // (min, max)
  bool empty(int category) const { return members_[category].empty(); }
  int categories() const { return static_cast<int>(members_.size()); }

 private:
  std::vector<std::multiset<double>> members_;
};

struct ScalarConditional {
  double mean = 0.0;
  double variance = 1.0;
};

/// Full conditional of the latent relation z_{ij,t} given every other latent
/// relation, the (working) attributes and the parameters. Terms: the entry
/// prior, the transition into t (or the initial-state regression at t = 0
/// when gamma0 is supplied), the transitions out of t for z_{ij,t+1} and
/// z_{ji,t+1}, and the attribute transitions of nodes i and j through C.
/// For undirected data z_{ij,t} = z_{ji,t} is a single variable (i < j).
/// next_means, when given, holds attribute_mean(., t + 1) for every node
/// (m x p) so the neighbour sums are not recomputed.
ScalarConditional z_full_conditional(const Panel& working, const McrParams& params, const ModelMode& mode,
                                     const Matrix& sigma_inverse, const LatentEntryPrior& prior,
                                     const Vector* initial_gamma, int i, int j, int t,
                                     const Matrix* next_means = nullptr);

/// Rank-likelihood interval for entry (i, j, t) computed by rescanning the
/// working tensor (reference for RankIndex; also used by tests).
std::pair<double, double> rank_bounds_scan(const std::vector<Matrix>& Z, const NetworkCoding& coding, bool directed,
                                           int i, int j, int t);

/// Ordinal bookkeeping for the latent network.
struct NetworkLatentState {
  NetworkCoding coding;
  OrdinalMode mode = OrdinalMode::threshold;
  Thresholds cuts;      // threshold mode
  RankIndex index{1};   // rank mode only
};

NetworkLatentState make_network_latent_state(const NetworkSeries& network, OrdinalMode mode, std::vector<Matrix>& Z,
                                             Rng& rng, std::optional<OrdinalLevels> levels = std::nullopt);

/// One sweep over t ascending, i ascending, j ascending (i < j undirected).
/// Observed entries of an ordinal network are truncated to their category
/// interval; unobserved entries (either scale) are drawn untruncated.
void step_z_sweep(std::vector<Matrix>& Z, std::span<const Matrix> X, const CovariateSpec& covariates,
                  const McrParams& params, const ModelMode& mode, const LatentEntryPrior& prior,
                  const Vector* initial_gamma, NetworkLatentState* ordinal, const NetworkSeries& observed, Rng& rng);

/// (min, max) latent value per category; (inf, -inf) when a category is empty.
using CategoryExtrema = std::vector<std::pair<double, double>>;
CategoryExtrema category_extrema(const std::vector<Matrix>& Z, const NetworkCoding& coding);
CategoryExtrema category_extrema(const std::vector<Matrix>& W, const AttributeCoding& coding, int k);

/// Draws every interior cut from N(prior_mean, prior_variance) truncated to
/// (max latent value in the category below, min latent value in the category above).
void step_thresholds(Thresholds& cuts, const CategoryExtrema& extrema, double prior_mean, double prior_variance,
                     Rng& rng);

struct AttributeLatentState {
  AttributeCoding coding;
  std::vector<OrdinalMode> modes;
  std::vector<Thresholds> cuts;
  std::vector<RankIndex> index;  // rank-mode attributes only
  double cut_mean = 0.0;
  double cut_variance = 100.0;
};

AttributeLatentState make_attribute_latent_state(const AttributeSeries& attributes, OrdinalMode mode,
                                                 std::vector<Matrix>& W, Rng& rng,
                                                 const std::vector<OrdinalLevels>& levels = {});

/// One sweep over t ascending, i ascending, k ascending. Each w_{i,k,t} is
/// drawn from its scalar full conditional (taken from the vector conditional
/// of w_{i,t}) truncated to its category interval, then the attribute cuts
/// are redrawn in threshold mode.
void step_w_sweep(std::vector<Matrix>& W, std::span<const Matrix> Z, const CovariateSpec& covariates,
                  const McrParams& params, const ModelMode& mode, const AttributeAnchor& anchor,
                  AttributeLatentState& state, Rng& rng);

}  // namespace mcr
