#include "mcr/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mcr {

std::string to_string(NetworkScale s) { return s == NetworkScale::gaussian ? "gaussian" : "ordinal"; }

std::string to_string(AttributeScale s) {
  switch (s) {
    case AttributeScale::gaussian: return "gaussian";
    case AttributeScale::ordinal: return "ordinal";
    case AttributeScale::latent: return "latent";
  }
  return "gaussian";
}

NetworkScale parse_network_scale(const std::string& s) {
  if (s == "gaussian") return NetworkScale::gaussian;
  if (s == "ordinal") return NetworkScale::ordinal;
  throw ValidationError("unknown network scale '" + s + "' (expected gaussian|ordinal)");
}

AttributeScale parse_attribute_scale(const std::string& s) {
  if (s == "gaussian") return AttributeScale::gaussian;
  if (s == "ordinal") return AttributeScale::ordinal;
  if (s == "latent") return AttributeScale::latent;
  throw ValidationError("unknown attribute scale '" + s + "' (expected gaussian|ordinal|latent)");
}

// --- NetworkSeries -----------------------------------------------------------

NetworkSeries::NetworkSeries(std::vector<Matrix> slices, bool directed, std::vector<Mask> observed)
    : directed_(directed), slices_(std::move(slices)), masks_(std::move(observed)) {
  if (slices_.empty()) throw DimensionError("network series needs at least one time point");
  m_ = static_cast<int>(slices_.front().rows());
  if (!masks_.empty() && masks_.size() != slices_.size())
    throw DimensionError("network mask count does not match the number of time points");
  for (std::size_t t = 0; t < slices_.size(); ++t) {
    Matrix& Y = slices_[t];
    if (Y.rows() != m_ || Y.cols() != m_)
      throw DimensionError("network slice " + std::to_string(t) + " is not " + std::to_string(m_) + "x" +
                           std::to_string(m_));
    if (!masks_.empty() && (masks_[t].rows() != m_ || masks_[t].cols() != m_))
      throw DimensionError("network mask " + std::to_string(t) + " has the wrong shape");
    for (int i = 0; i < m_; ++i) {
      Y(i, i) = 0.0;
      if (!masks_.empty()) masks_[t](i, i) = true;
    }
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (i == j) continue;
        const bool obs = masks_.empty() || masks_[t](i, j);
        if (!obs) {
          Y(i, j) = 0.0;
          continue;
        }
        if (!std::isfinite(Y(i, j)))
          throw ValidationError("non-finite network value at t=" + std::to_string(t) + " (" +
                                std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
    }
    if (!directed_) {
      for (int i = 0; i < m_; ++i) {
        for (int j = i + 1; j < m_; ++j) {
          const bool oij = masks_.empty() || masks_[t](i, j);
          const bool oji = masks_.empty() || masks_[t](j, i);
          if (oij != oji || (oij && Y(i, j) != Y(j, i))) {
            std::ostringstream msg;
            msg << "undirected network is asymmetric at t=" << t << " pair (" << i + 1 << "," << j + 1 << ")";
            throw ValidationError(msg.str());
          }
        }
      }
    }
  }
  if (!masks_.empty()) {
    bool all = true;
    for (const auto& M : masks_) all = all && M.all();
    if (all) masks_.clear();
  }
}

long NetworkSeries::missing_count() const {
  if (masks_.empty()) return 0;
  long count = 0;
  for (const auto& M : masks_)
    for (int i = 0; i < m_; ++i)
      for (int j = directed_ ? 0 : i + 1; j < m_; ++j)
        if (i != j && !M(i, j)) ++count;
  return count;
}

// --- AttributeSeries -----------------------------------------------------------

AttributeSeries::AttributeSeries(std::vector<Matrix> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) throw DimensionError("attribute series needs at least one time point");
  m_ = static_cast<int>(slices_.front().rows());
  p_ = static_cast<int>(slices_.front().cols());
  for (std::size_t t = 0; t < slices_.size(); ++t) {
    if (slices_[t].rows() != m_ || slices_[t].cols() != p_)
      throw DimensionError("attribute slice " + std::to_string(t) + " has inconsistent shape");
    if (!slices_[t].allFinite())
      throw ValidationError("non-finite attribute value at t=" + std::to_string(t));
  }
}

AttributeSeries AttributeSeries::empty(int m, int time_points) {
  return AttributeSeries(std::vector<Matrix>(static_cast<std::size_t>(time_points), Matrix(m, 0)));
}

// --- CovariateSpec -------------------------------------------------------------

CovariateSpec::CovariateSpec(int m, bool directed, std::optional<Matrix> dyad, std::optional<Matrix> node)
    : m_(m), directed_(directed), dyad_(std::move(dyad)) {
  if (dyad_) {
    if (dyad_->rows() != static_cast<Eigen::Index>(m) * m)
      throw DimensionError("dyad covariate matrix must have m*m rows");
    if (!directed_) {
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (dyad_->row(i + m * j) != dyad_->row(j + m * i))
            throw ValidationError("undirected dyad covariates must satisfy s_ij = s_ji");
    }
  }
  if (node) {
    if (node->rows() != m) throw DimensionError("node covariate matrix must have m rows");
    node_ = std::move(*node);
    node_saturated_ = false;
  } else {
    node_ = Matrix::Identity(m, m);
    node_saturated_ = true;
  }
}

CovariateSpec CovariateSpec::saturated(int m, bool directed) {
  return CovariateSpec(m, directed, std::nullopt, std::nullopt);
}

int CovariateSpec::dyad_dim() const {
  if (dyad_) return static_cast<int>(dyad_->cols());
  return directed_ ? m_ * (m_ - 1) : m_ * (m_ - 1) / 2;
}

int CovariateSpec::dyad_index(int i, int j) const {
  if (i == j) throw ValidationError("dyad index requested for a diagonal entry");
  if (directed_) return i * (m_ - 1) + (j < i ? j : j - 1);
  if (i > j) std::swap(i, j);
  return i * m_ - i * (i + 1) / 2 + (j - i - 1);
}

Vector CovariateSpec::dyad(int i, int j) const {
  if (dyad_) return dyad_->row(i + m_ * j).transpose();
  Vector s = Vector::Zero(dyad_dim());
  s(dyad_index(i, j)) = 1.0;
  return s;
}

double CovariateSpec::dyad_effect(const Vector& gamma, int i, int j) const {
  if (dyad_) return dyad_->row(i + m_ * j).dot(gamma);
  return gamma(dyad_index(i, j));
}

void CovariateSpec::add_dyad(int i, int j, double scale, Eigen::Ref<Vector> out) const {
  if (dyad_)
    out += scale * dyad_->row(i + m_ * j).transpose();
  else
    out(dyad_index(i, j)) += scale;
}

// --- McrParams -----------------------------------------------------------------

McrParams McrParams::zeros(const ModelMode& mode, int q_dyad, int q_node, int p) {
  McrParams params;
  params.gamma = Vector::Zero(q_dyad);
  params.alpha1 = 0.0;
  if (mode.directed) params.alpha2 = 0.0;
  params.H = Matrix::Zero(p, p);
  params.Gamma = Matrix::Zero(p, q_node);
  params.A = Matrix::Zero(p, p);
  params.C1 = Matrix::Zero(p, p);
  if (mode.directed) params.C2 = Matrix::Zero(p, p);
  params.sigma2 = 1.0;
  params.Sigma = Matrix::Identity(p, p);
  return params;
}

void McrParams::validate(const ModelMode& mode, int q_dyad, int q_node) const {
  const int p = dims();
  auto fail = [](const std::string& msg) { throw ValidationError("parameters: " + msg); };
  if (gamma.size() != q_dyad)
    fail("gamma has length " + std::to_string(gamma.size()) + ", expected " + std::to_string(q_dyad));
  auto square = [&](const Matrix& M, const char* name) {
    if (M.rows() != p || M.cols() != p) fail(std::string(name) + " must be " + std::to_string(p) + "x" + std::to_string(p));
  };
  square(H, "H");
  square(A, "A");
  square(C1, "C1");
  square(Sigma, "Sigma");
  if (Gamma.rows() != p || Gamma.cols() != q_node)
    fail("Gamma must be " + std::to_string(p) + "x" + std::to_string(q_node));
  if (mode.directed) {
    if (!alpha2) fail("directed mode requires alpha2");
    if (!C2) fail("directed mode requires C2");
    square(*C2, "C2");
  } else {
    if (alpha2) fail("undirected mode forbids alpha2");
    if (C2) fail("undirected mode forbids C2");
    if (p > 0 && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10) fail("undirected mode requires symmetric H");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) fail("sigma2 must be positive");
  if (p > 0) {
    if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10) fail("Sigma must be symmetric");
    Eigen::LLT<Matrix> llt(Sigma);
    if (llt.info() != Eigen::Success) fail("Sigma must be positive definite");
  }
  if (mode.diagonal_homophily() && p > 0) {
    Matrix off = H;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 0.0) fail("latent mode requires diagonal H");
  }
  if (mode.unit_attribute_covariance() && p > 0 && (Sigma - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-12)
    fail("latent/ordinal attributes require Sigma = I");
  if (mode.unit_network_variance() && sigma2 != 1.0) fail("ordinal network requires sigma2 = 1");
}

// --- Panel ---------------------------------------------------------------------

Panel::Panel(std::span<const Matrix> network, std::span<const Matrix> attributes, const CovariateSpec& covariates,
             bool directed, std::span<const Mask> observed)
    : network_(network), attributes_(attributes), covariates_(&covariates), observed_(observed),
      directed_(directed) {
  if (network_.empty()) throw DimensionError("panel has no time points");
  if (attributes_.size() != network_.size())
    throw DimensionError("network and attribute series have different numbers of time points");
  m_ = static_cast<int>(network_.front().rows());
  p_ = static_cast<int>(attributes_.front().cols());
  if (attributes_.front().rows() != m_) throw DimensionError("network and attribute series disagree on m");
  if (covariates.nodes() != m_) throw DimensionError("covariates disagree with the network on m");
  if (covariates.directed() != directed) throw DimensionError("covariates disagree with the network on direction");
}

// --- design rows ---------------------------------------------------------------

Vector vech(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("vech requires a square matrix");
  if (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("vech requires a symmetric matrix");
  const int p = static_cast<int>(M.rows());
  Vector v(p * (p + 1) / 2);
  int k = 0;
  for (int c = 0; c < p; ++c)
    for (int r = c; r < p; ++r) v(k++) = M(r, c);
  return v;
}

Matrix unvech(const Vector& v, int p) {
  if (v.size() != p * (p + 1) / 2) throw DimensionError("unvech: length does not match p(p+1)/2");
  Matrix M(p, p);
  int k = 0;
  for (int c = 0; c < p; ++c)
    for (int r = c; r < p; ++r) {
      M(r, c) = v(k);
      M(c, r) = v(k);
      ++k;
    }
  return M;
}

int homophily_dim(int p, const ModelMode& mode) {
  if (mode.diagonal_homophily()) return p;
  return mode.directed ? p * p : p * (p + 1) / 2;
}

Vector homophily_coefficients(const Matrix& H, const ModelMode& mode) {
  if (mode.diagonal_homophily()) return H.diagonal();
  if (mode.directed) return H.reshaped();
  return vech(H);
}

Matrix homophily_matrix(const Vector& h, int p, const ModelMode& mode) {
  if (h.size() != homophily_dim(p, mode)) throw DimensionError("homophily coefficient length mismatch");
  if (mode.diagonal_homophily()) return h.asDiagonal();
  if (mode.directed) return h.reshaped(p, p);
  return unvech(h, p);
}

namespace {

template <typename Out>
void write_homophily(const Eigen::Ref<const Vector>& xi, const Eigen::Ref<const Vector>& xj, const ModelMode& mode,
                     Out&& out) {
  const int p = static_cast<int>(xi.size());
  if (mode.diagonal_homophily()) {
    for (int k = 0; k < p; ++k) out(k) = xi(k) * xj(k);
  } else if (mode.directed) {
    // vec(H)' (x_j kron x_i) = x_i' H x_j with column-major vec.
    for (int l = 0; l < p; ++l)
      for (int k = 0; k < p; ++k) out(l * p + k) = xj(l) * xi(k);
  } else {
    int idx = 0;
    for (int c = 0; c < p; ++c)
      for (int r = c; r < p; ++r) out(idx++) = (r == c) ? xi(r) * xj(r) : xi(r) * xj(c) + xi(c) * xj(r);
  }
}

}  // namespace

Vector homophily_regressor(const Vector& xi, const Vector& xj, const ModelMode& mode) {
  if (xi.size() != xj.size()) throw DimensionError("homophily regressor: attribute vectors differ in length");
  Vector out(homophily_dim(static_cast<int>(xi.size()), mode));
  write_homophily(xi, xj, mode, out);
  return out;
}

int network_dynamic_length(int p, const ModelMode& mode) {
  const int ar = mode.autoregression ? (mode.directed ? 2 : 1) : 0;
  return ar + homophily_dim(p, mode);
}

int network_row_length(int q_dyad, int p, const ModelMode& mode) { return q_dyad + network_dynamic_length(p, mode); }

int attribute_row_length(int q_node, int p, const ModelMode& mode) {
  const int contagion = mode.contagion ? (mode.directed ? 2 * p : p) : 0;
  return q_node + p + contagion;
}

void network_dynamic_part(const Panel& data, int i, int j, int t, const ModelMode& mode, Eigen::Ref<Vector> out) {
  int k = 0;
  if (mode.autoregression) {
    out(k++) = data.y(t - 1, i, j);
    if (mode.directed) out(k++) = data.y(t - 1, j, i);
  }
  const Matrix& X = data.X(t - 1);
  write_homophily(X.row(i).transpose(), X.row(j).transpose(), mode, out.segment(k, out.size() - k));
}

Vector network_design_row(const Panel& data, int i, int j, int t, const ModelMode& mode) {
  if (t < 1 || t >= data.time_points())
    throw ValidationError("network design row needs 1 <= t <= n (no lagged slice for t=" + std::to_string(t) + ")");
  if (i == j) throw ValidationError("network design row requested for diagonal entry");
  if (mode.directed != data.directed()) throw DimensionError("mode direction disagrees with the data");
  const CovariateSpec& cov = data.covariates();
  const int q = cov.dyad_dim();
  Vector w = Vector::Zero(network_row_length(q, data.dims(), mode));
  cov.add_dyad(i, j, 1.0, w.head(q));
  network_dynamic_part(data, i, j, t, mode, w.tail(w.size() - q));
  return w;
}

Vector attribute_design_row(const Panel& data, int i, int t, const ModelMode& mode) {
  if (t < 1 || t >= data.time_points())
    throw ValidationError("attribute design row needs 1 <= t <= n (no lagged slice for t=" + std::to_string(t) + ")");
  if (mode.directed != data.directed()) throw DimensionError("mode direction disagrees with the data");
  const CovariateSpec& cov = data.covariates();
  const int q = cov.node_dim();
  const int p = data.dims();
  Vector w(attribute_row_length(q, p, mode));
  const Matrix& X = data.X(t - 1);
  const Matrix& Y = data.Y(t - 1);
  w.head(q) = cov.node_matrix().row(i).transpose();
  w.segment(q, p) = X.row(i).transpose();
  if (mode.contagion) {
    w.segment(q + p, p).noalias() = X.transpose() * Y.row(i).transpose();
    if (mode.directed) w.segment(q + 2 * p, p).noalias() = X.transpose() * Y.col(i);
  }
  return w;
}

Vector pack_beta(const McrParams& params, const ModelMode& mode) {
  const int q = static_cast<int>(params.gamma.size());
  const int p = params.dims();
  Vector beta(network_row_length(q, p, mode));
  beta.head(q) = params.gamma;
  int k = q;
  if (mode.autoregression) {
    beta(k++) = params.alpha1;
    if (mode.directed) beta(k++) = params.alpha2.value_or(0.0);
  }
  beta.tail(beta.size() - k) = homophily_coefficients(params.H, mode);
  return beta;
}

void unpack_beta(const Vector& beta, const ModelMode& mode, McrParams& params) {
  const int q = static_cast<int>(params.gamma.size());
  const int p = params.dims();
  if (beta.size() != network_row_length(q, p, mode)) throw DimensionError("beta has the wrong length");
  params.gamma = beta.head(q);
  int k = q;
  if (mode.autoregression) {
    params.alpha1 = beta(k++);
    if (mode.directed) params.alpha2 = beta(k++);
  } else {
    params.alpha1 = 0.0;
    if (mode.directed) params.alpha2 = 0.0;
  }
  params.H = homophily_matrix(beta.tail(beta.size() - k), p, mode);
}

Matrix pack_B(const McrParams& params, const ModelMode& mode) {
  const int p = params.dims();
  const int q = static_cast<int>(params.Gamma.cols());
  Matrix B(p, attribute_row_length(q, p, mode));
  B.leftCols(q) = params.Gamma;
  B.middleCols(q, p) = params.A;
  if (mode.contagion) {
    B.middleCols(q + p, p) = params.C1;
    if (mode.directed) B.middleCols(q + 2 * p, p) = params.C2.value_or(Matrix::Zero(p, p));
  }
  return B;
}

void unpack_B(const Matrix& B, const ModelMode& mode, McrParams& params) {
  const int p = params.dims();
  const int q = static_cast<int>(params.Gamma.cols());
  if (B.rows() != p || B.cols() != attribute_row_length(q, p, mode)) throw DimensionError("B has the wrong shape");
  params.Gamma = B.leftCols(q);
  params.A = B.middleCols(q, p);
  if (mode.contagion) {
    params.C1 = B.middleCols(q + p, p);
    if (mode.directed) params.C2 = B.middleCols(q + 2 * p, p);
  } else {
    params.C1 = Matrix::Zero(p, p);
    if (mode.directed) params.C2 = Matrix::Zero(p, p);
  }
}

std::vector<std::string> network_column_names(int q_dyad, int p, const ModelMode& mode) {
  std::vector<std::string> names;
  for (int k = 0; k < q_dyad; ++k) names.push_back("gamma[" + std::to_string(k) + "]");
  if (mode.autoregression) {
    names.push_back(mode.directed ? "alpha1" : "alpha");
    if (mode.directed) names.push_back("alpha2");
  }
  if (mode.diagonal_homophily()) {
    for (int k = 0; k < p; ++k) names.push_back("H[" + std::to_string(k) + "," + std::to_string(k) + "]");
  } else if (mode.directed) {
    for (int c = 0; c < p; ++c)
      for (int r = 0; r < p; ++r) names.push_back("H[" + std::to_string(r) + "," + std::to_string(c) + "]");
  } else {
    for (int c = 0; c < p; ++c)
      for (int r = c; r < p; ++r) names.push_back("H[" + std::to_string(r) + "," + std::to_string(c) + "]");
  }
  return names;
}

std::vector<std::string> attribute_column_names(int q_node, int p, const ModelMode& mode) {
  std::vector<std::string> names;
  for (int k = 0; k < q_node; ++k) names.push_back("s[" + std::to_string(k) + "]");
  for (int k = 0; k < p; ++k) names.push_back("x[" + std::to_string(k) + "]");
  if (mode.contagion) {
    for (int k = 0; k < p; ++k) names.push_back((mode.directed ? "out_contagion[" : "contagion[") + std::to_string(k) + "]");
    if (mode.directed)
      for (int k = 0; k < p; ++k) names.push_back("in_contagion[" + std::to_string(k) + "]");
  }
  return names;
}

double network_mean(const Panel& data, const McrParams& params, const ModelMode& mode, int i, int j, int t) {
  const Matrix& X = data.X(t - 1);
  double mean = data.covariates().dyad_effect(params.gamma, i, j);
  if (mode.autoregression) {
    mean += params.alpha1 * data.y(t - 1, i, j);
    if (mode.directed) mean += params.alpha2.value_or(0.0) * data.y(t - 1, j, i);
  }
  // x_i' H x_j without temporaries; this sits in the innermost sampler loop
  const int p = data.dims();
  for (int l = 0; l < p; ++l) {
    double hx = 0.0;
    for (int k = 0; k < p; ++k) hx += X(i, k) * params.H(k, l);
    mean += hx * X(j, l);
  }
  return mean;
}

Vector attribute_mean(const Panel& data, const McrParams& params, const ModelMode& mode, int i, int t) {
  const Matrix& X = data.X(t - 1);
  const Matrix& Y = data.Y(t - 1);
  Vector mean = params.Gamma * data.covariates().node_matrix().row(i).transpose() + params.A * X.row(i).transpose();
  if (mode.contagion) {
    mean.noalias() += params.C1 * (X.transpose() * Y.row(i).transpose());
    if (mode.directed && params.C2) mean.noalias() += *params.C2 * (X.transpose() * Y.col(i));
  }
  return mean;
}

double log_likelihood(const Panel& data, const McrParams& params, const ModelMode& mode) {
  const int m = data.nodes();
  const int p = data.dims();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double ll = 0.0;
  for (int t = 1; t < data.time_points(); ++t) {
    for (int i = 0; i < m; ++i) {
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j || !data.observed(t, i, j)) continue;
        const double r = data.y(t, i, j) - network_mean(data, params, mode, i, j, t);
        ll += -0.5 * (log2pi + std::log(params.sigma2) + r * r / params.sigma2);
      }
    }
  }
  if (p > 0) {
    Eigen::LLT<Matrix> llt(params.Sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("log_likelihood: Sigma is not positive definite");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    for (int t = 1; t < data.time_points(); ++t) {
      for (int i = 0; i < m; ++i) {
        const Vector e = data.X(t).row(i).transpose() - attribute_mean(data, params, mode, i, t);
        ll += -0.5 * (p * log2pi + logdet + e.dot(llt.solve(e)));
      }
    }
  }
  return ll;
}

McrParams transform_attribute_basis(const McrParams& params, std::span<const int> perm, std::span<const double> signs) {
  const int p = params.dims();
  if (static_cast<int>(perm.size()) != p || static_cast<int>(signs.size()) != p)
    throw DimensionError("basis transform needs p permutation entries and p signs");
  Matrix R = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) R(perm[k], k) = signs[k];
  McrParams out = params;
  out.H = R.transpose() * params.H * R;
  out.A = R.transpose() * params.A * R;
  out.C1 = R.transpose() * params.C1 * R;
  if (params.C2) out.C2 = R.transpose() * (*params.C2) * R;
  out.Gamma = R.transpose() * params.Gamma;
  out.Sigma = R.transpose() * params.Sigma * R;
  return out;
}

}  // namespace mcr
