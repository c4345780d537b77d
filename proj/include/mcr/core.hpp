#pragma once

// Domain types for longitudinal network + nodal attribute data and the
// design-row algebra that turns the coevolution model into two linear
// regressions:
//
//   y_{ij,t+1} = mu_ij + alpha1 y_{ij,t} [+ alpha2 y_{ji,t}] + x_i' H x_j + eps
//   x_{i,t+1}  = theta_i + A x_i + C1 X' y_{i.} [+ C2 X' y_{.i}] + e
//
// Time index t runs 0..n, nodes 0..m-1 internally (1-based in files).

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcr/errors.hpp"

namespace mcr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class NetworkScale { gaussian, ordinal };
enum class AttributeScale { gaussian, ordinal, latent };

struct ModelMode {
  bool directed = false;
  NetworkScale network_scale = NetworkScale::gaussian;
  AttributeScale attribute_scale = AttributeScale::gaussian;
  // Nested-submodel switches: dropping the network autoregression term
  // removes alpha (alpha1, alpha2); dropping contagion removes C (C1, C2).
  bool autoregression = true;
  bool contagion = true;

  bool diagonal_homophily() const { return attribute_scale == AttributeScale::latent; }
  bool unit_network_variance() const { return network_scale == NetworkScale::ordinal; }
  // Latent and ordinal attributes both fix Sigma = I.
  bool unit_attribute_covariance() const { return attribute_scale != AttributeScale::gaussian; }
};

std::string to_string(NetworkScale s);
std::string to_string(AttributeScale s);
NetworkScale parse_network_scale(const std::string& s);
AttributeScale parse_attribute_scale(const std::string& s);

/// Time-indexed m x m sociomatrices. Diagonal stored as 0 and never read.
/// Unobserved entries are stored as 0 with observed(t, i, j) == false.
class NetworkSeries {
 public:
  NetworkSeries() = default;
  NetworkSeries(std::vector<Matrix> slices, bool directed, std::vector<Mask> observed = {});

  int nodes() const { return m_; }
  int time_points() const { return static_cast<int>(slices_.size()); }
  int transitions() const { return time_points() - 1; }
  bool directed() const { return directed_; }

  double operator()(int t, int i, int j) const { return slices_[t](i, j); }
  const Matrix& slice(int t) const { return slices_[t]; }
  const std::vector<Matrix>& slices() const { return slices_; }
  bool observed(int t, int i, int j) const { return masks_.empty() || masks_[t](i, j); }
  bool fully_observed() const { return masks_.empty(); }
  const std::vector<Mask>& masks() const { return masks_; }
  /// Missing off-diagonal entries (each unordered pair once when undirected).
  long missing_count() const;

 private:
  int m_ = 0;
  bool directed_ = false;
  std::vector<Matrix> slices_;
  std::vector<Mask> masks_;  // empty when fully observed
};

/// Time-indexed m x p attribute matrices; row i of slice t is x_{i,t}.
class AttributeSeries {
 public:
  AttributeSeries() = default;
  explicit AttributeSeries(std::vector<Matrix> slices);
  /// Empty (p = 0) series with the given shape.
  static AttributeSeries empty(int m, int time_points);

  int nodes() const { return m_; }
  int dims() const { return p_; }
  int time_points() const { return static_cast<int>(slices_.size()); }
  double operator()(int t, int i, int k) const { return slices_[t](i, k); }
  const Matrix& slice(int t) const { return slices_[t]; }
  const std::vector<Matrix>& slices() const { return slices_; }

 private:
  int m_ = 0;
  int p_ = 0;
  std::vector<Matrix> slices_;
};

/// Exogenous covariates s_ij (dyads) and s_i (nodes). Absent covariates are
/// saturated one-hot intercepts so that gamma' s_ij = mu_ij and Gamma s_i = theta_i.
///
/// Saturated dyad ordering: undirected pairs i < j in lexicographic order;
/// directed ordered pairs i != j in lexicographic order.
class CovariateSpec {
 public:
  CovariateSpec() = default;
  /// dyad: (m*m) x q matrix, row i + m*j holds s_ij. node: m x q matrix.
  CovariateSpec(int m, bool directed, std::optional<Matrix> dyad, std::optional<Matrix> node);
  static CovariateSpec saturated(int m, bool directed);

  int nodes() const { return m_; }
  bool directed() const { return directed_; }
  int dyad_dim() const;
  int node_dim() const { return static_cast<int>(node_.cols()); }
  bool saturated_dyads() const { return !dyad_.has_value(); }
  bool saturated_nodes() const { return node_saturated_; }

  int dyad_index(int i, int j) const;
  Vector dyad(int i, int j) const;
  Vector node(int i) const { return node_.row(i).transpose(); }
  const Matrix& node_matrix() const { return node_; }
  const std::optional<Matrix>& dyad_matrix() const { return dyad_; }

  /// gamma' s_ij without materialising s_ij.
  double dyad_effect(const Vector& gamma, int i, int j) const;
  /// Adds scale * s_ij into out (length dyad_dim()).
  void add_dyad(int i, int j, double scale, Eigen::Ref<Vector> out) const;

 private:
  int m_ = 0;
  bool directed_ = false;
  std::optional<Matrix> dyad_;
  Matrix node_;
  bool node_saturated_ = true;
};

/// Full parameter set of the coevolution model.
struct McrParams {
  Vector gamma;
  double alpha1 = 0.0;
  std::optional<double> alpha2;  // directed only
  Matrix H;
  Matrix Gamma;                   // p x q_node
  Matrix A;
  Matrix C1;
  std::optional<Matrix> C2;       // directed only
  double sigma2 = 1.0;
  Matrix Sigma;

  int dims() const { return static_cast<int>(A.rows()); }
  /// Zero parameters of the right shape (sigma2 = 1, Sigma = I).
  static McrParams zeros(const ModelMode& mode, int q_dyad, int q_node, int p);
  /// Throws ValidationError when shapes or constraints disagree with the mode.
  void validate(const ModelMode& mode, int q_dyad, int q_node) const;
};

/// Read-only view over network and attribute slices plus covariates, used by
/// every design-row builder. Observed data and sampler working state both
/// expose themselves through this view.
class Panel {
 public:
  Panel(std::span<const Matrix> network, std::span<const Matrix> attributes,
        const CovariateSpec& covariates, bool directed, std::span<const Mask> observed = {});

  int nodes() const { return m_; }
  int time_points() const { return static_cast<int>(network_.size()); }
  int dims() const { return p_; }
  bool directed() const { return directed_; }
  const CovariateSpec& covariates() const { return *covariates_; }

  double y(int t, int i, int j) const { return network_[t](i, j); }
  const Matrix& Y(int t) const { return network_[t]; }
  const Matrix& X(int t) const { return attributes_[t]; }
  bool observed(int t, int i, int j) const { return observed_.empty() || observed_[t](i, j); }
  bool fully_observed() const { return observed_.empty(); }

 private:
  std::span<const Matrix> network_;
  std::span<const Matrix> attributes_;
  const CovariateSpec* covariates_;
  std::span<const Mask> observed_;
  bool directed_;
  int m_;
  int p_;
};

struct Dataset {
  NetworkSeries network;
  AttributeSeries attributes;
  CovariateSpec covariates;

  Panel panel() const {
    return Panel(network.slices(), attributes.slices(), covariates, network.directed(), network.masks());
  }
};

// --- design-row algebra ----------------------------------------------------

/// Lower triangle (with diagonal), column-major.
Vector vech(const Matrix& M);
Matrix unvech(const Vector& v, int p);

int homophily_dim(int p, const ModelMode& mode);
/// h such that h' homophily_regressor(x_i, x_j) = x_i' H x_j.
Vector homophily_coefficients(const Matrix& H, const ModelMode& mode);
Matrix homophily_matrix(const Vector& h, int p, const ModelMode& mode);
Vector homophily_regressor(const Vector& xi, const Vector& xj, const ModelMode& mode);

int network_dynamic_length(int p, const ModelMode& mode);
int network_row_length(int q_dyad, int p, const ModelMode& mode);
int attribute_row_length(int q_node, int p, const ModelMode& mode);

/// w_{ij,t} = (s_ij, y_{ij,t-1} [, y_{ji,t-1}], homophily(x_{i,t-1}, x_{j,t-1})).
Vector network_design_row(const Panel& data, int i, int j, int t, const ModelMode& mode);
/// w_{i,t} = (s_i, x_{i,t-1}, X_{t-1}' y_{i.,t-1} [, X_{t-1}' y_{.i,t-1}]).
Vector attribute_design_row(const Panel& data, int i, int t, const ModelMode& mode);

/// Non-covariate tail of the network design row, written into out.
void network_dynamic_part(const Panel& data, int i, int j, int t, const ModelMode& mode,
                          Eigen::Ref<Vector> out);

/// beta = (gamma, alpha1 [, alpha2], h) in design-row order.
Vector pack_beta(const McrParams& params, const ModelMode& mode);
void unpack_beta(const Vector& beta, const ModelMode& mode, McrParams& params);
/// B = [Gamma A C1 [C2]] in design-row order.
Matrix pack_B(const McrParams& params, const ModelMode& mode);
void unpack_B(const Matrix& B, const ModelMode& mode, McrParams& params);

std::vector<std::string> network_column_names(int q_dyad, int p, const ModelMode& mode);
std::vector<std::string> attribute_column_names(int q_node, int p, const ModelMode& mode);

/// Mean of y_{ij,t} given slice t-1 (t >= 1).
double network_mean(const Panel& data, const McrParams& params, const ModelMode& mode, int i, int j, int t);
/// Mean of x_{i,t} given slice t-1 (t >= 1).
Vector attribute_mean(const Panel& data, const McrParams& params, const ModelMode& mode, int i, int t);

/// Conditional Gaussian log-likelihood of slices 1..n given slice 0.
/// Pairs i<j when undirected, i != j when directed. Unobserved network
/// entries are skipped as responses.
double log_likelihood(const Panel& data, const McrParams& params, const ModelMode& mode);

/// Applies x -> R' x with R = P D (column permutation then sign flips) to the
/// attribute basis: H -> R' H R, A -> R' A R, C -> R' C R, Gamma -> R' Gamma.
/// perm[k] is the source column placed at position k.
McrParams transform_attribute_basis(const McrParams& params, std::span<const int> perm,
                                    std::span<const double> signs);

}  // namespace mcr
