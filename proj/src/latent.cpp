#include "mcr/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcr {

AttributeAnchor AttributeAnchor::standard_normal(int m, int p) {
  AttributeAnchor anchor;
  anchor.initial = true;
  anchor.initial_mean = Matrix::Zero(m, p);
  anchor.initial_variance = Vector::Ones(p);
  return anchor;
}

InformationForm attribute_full_conditional(const Panel& w, const McrParams& params, const ModelMode& mode,
                                           const Matrix& sigma_inverse, const AttributeAnchor& anchor, int i, int t) {
  const int p = w.dims();
  const int m = w.nodes();
  const int T = w.time_points();
  if (t < 0 || t >= T) throw ValidationError("attribute conditional: t out of range");
  InformationForm info{Matrix::Zero(p, p), Vector::Zero(p)};

  if (t >= 1) {
    const Vector mean = attribute_mean(w, params, mode, i, t);
    info.precision += sigma_inverse;
    info.linear += sigma_inverse * mean;
  } else if (anchor.initial) {
    const Vector prec = anchor.initial_variance.cwiseInverse();
    info.precision.diagonal() += prec;
    info.linear += prec.cwiseProduct(anchor.initial_mean.row(i).transpose());
  }
  if (anchor.every_entry && anchor.every_entry->applies(t)) {
    info.precision.diagonal().array() += 1.0 / anchor.every_entry->variance;
    info.linear.array() += anchor.every_entry->mean / anchor.every_entry->variance;
  }
  if (t + 1 >= T) return info;

  const Matrix& Xt = w.X(t);
  const Vector xi = Xt.row(i).transpose();

  // Network transitions at t+1: x_i' H x_j and (directed) x_j' H x_i.
  const double inv_s2 = 1.0 / params.sigma2;
  for (int j = 0; j < m; ++j) {
    if (j == i) continue;
    const Vector xj = Xt.row(j).transpose();
    {
      const Vector g = params.H * xj;
      const double resid = w.y(t + 1, i, j) - (network_mean(w, params, mode, i, j, t + 1) - g.dot(xi));
      info.precision.noalias() += inv_s2 * g * g.transpose();
      info.linear += (inv_s2 * resid) * g;
    }
    if (mode.directed) {
      const Vector g = params.H.transpose() * xj;
      const double resid = w.y(t + 1, j, i) - (network_mean(w, params, mode, j, i, t + 1) - g.dot(xi));
      info.precision.noalias() += inv_s2 * g * g.transpose();
      info.linear += (inv_s2 * resid) * g;
    }
  }

  // Attribute transitions at t+1.
  {
    const Vector resid = w.X(t + 1).row(i).transpose() - (attribute_mean(w, params, mode, i, t + 1) - params.A * xi);
    const Matrix AtSi = params.A.transpose() * sigma_inverse;
    info.precision.noalias() += AtSi * params.A;
    info.linear.noalias() += AtSi * resid;
  }
  if (mode.contagion) {
    const Matrix& Yt = w.Y(t);
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      Matrix G = params.C1 * Yt(j, i);
      if (mode.directed) G += *params.C2 * Yt(i, j);
      if (G.isZero(0.0)) continue;
      const Vector resid = w.X(t + 1).row(j).transpose() - (attribute_mean(w, params, mode, j, t + 1) - G * xi);
      const Matrix GtSi = G.transpose() * sigma_inverse;
      info.precision.noalias() += GtSi * G;
      info.linear.noalias() += GtSi * resid;
    }
  }
  return info;
}

Gaussian latent_full_conditional(const Panel& working, const McrParams& params, const ModelMode& mode,
                                 const AttributeAnchor& anchor, int i, int t) {
  const int p = working.dims();
  return attribute_full_conditional(working, params, mode, Matrix::Identity(p, p), anchor, i, t).moments();
}

void step_latent_sweep(std::vector<Matrix>& X, std::span<const Matrix> Z, const CovariateSpec& covariates,
                       const McrParams& params, const ModelMode& mode, const AttributeAnchor& anchor, Rng& rng) {
  if (X.empty()) return;
  const int m = static_cast<int>(X.front().rows());
  const int p = static_cast<int>(X.front().cols());
  const Matrix identity = Matrix::Identity(p, p);
  const Panel working(Z, X, covariates, mode.directed);
  for (int t = 0; t < static_cast<int>(X.size()); ++t) {
    for (int i = 0; i < m; ++i) {
      const InformationForm info = attribute_full_conditional(working, params, mode, identity, anchor, i, t);
      X[t].row(i) = gaussian_from_precision(rng, info.precision, info.linear).transpose();
    }
  }
}

std::vector<Matrix> initialize_latent(std::span<const Matrix> network, int p, Rng& rng) {
  std::vector<Matrix> X;
  X.reserve(network.size());
  for (std::size_t t = 0; t < network.size(); ++t) {
    const Matrix& Y = network[t];
    const Eigen::Index m = Y.rows();
    Matrix S = 0.5 * (Y + Y.transpose());
    const double off_mean = m > 1 ? S.sum() / static_cast<double>(m * (m - 1)) : 0.0;
    S.array() -= off_mean;
    S.diagonal().setZero();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    const Vector& ev = eig.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev(a)) > std::abs(ev(b)); });
    Matrix Xt = Matrix::Zero(m, p);
    for (int k = 0; k < p && k < m; ++k) {
      Xt.col(k) = eig.eigenvectors().col(order[k]) * std::sqrt(std::abs(ev(order[k])));
      if (!X.empty() && Xt.col(k).dot(X.back().col(k)) < 0.0) Xt.col(k) *= -1.0;
    }
    for (Eigen::Index i = 0; i < m; ++i)
      for (int k = 0; k < p; ++k) Xt(i, k) += 0.01 * rng.normal();
    X.push_back(std::move(Xt));
  }
  return X;
}

Alignment best_alignment(std::span<const Matrix> reference, std::span<const Matrix> draw) {
  if (reference.size() != draw.size() || reference.empty()) throw DimensionError("alignment: trajectory length mismatch");
  const int p = static_cast<int>(reference.front().cols());
  Matrix cross = Matrix::Zero(p, p);
  for (std::size_t t = 0; t < reference.size(); ++t) cross.noalias() += reference[t].transpose() * draw[t];

  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  Alignment best{perm, std::vector<double>(static_cast<std::size_t>(p), 1.0)};
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int k = 0; k < p; ++k) score += std::abs(cross(k, perm[k]));
    if (score > best_score) {
      best_score = score;
      best.perm = perm;
      for (int k = 0; k < p; ++k) best.signs[k] = cross(k, perm[k]) < 0.0 ? -1.0 : 1.0;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<Matrix> apply_alignment(std::span<const Matrix> trajectory, const Alignment& alignment) {
  std::vector<Matrix> out;
  out.reserve(trajectory.size());
  for (const Matrix& X : trajectory) {
    Matrix Y(X.rows(), X.cols());
    for (Eigen::Index k = 0; k < X.cols(); ++k) Y.col(k) = alignment.signs[k] * X.col(alignment.perm[k]);
    out.push_back(std::move(Y));
  }
  return out;
}

}  // namespace mcr
