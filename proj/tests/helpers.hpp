#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mcr/simulate.hpp"

namespace testing_support {

using mcr::Matrix;
using mcr::Vector;

inline Matrix random_matrix(mcr::Rng& rng, int r, int c, double scale) {
  Matrix M(r, c);
  for (int k = 0; k < M.size(); ++k) M.data()[k] = scale * rng.normal();
  return M;
}

/// Covariates with a random mix of saturated and explicit columns.
inline mcr::CovariateSpec random_covariates(mcr::Rng& rng, int m, bool directed, bool saturated_dyads,
                                            bool saturated_nodes) {
  std::optional<Matrix> dyad;
  std::optional<Matrix> node;
  if (!saturated_dyads) {
    Matrix S = Matrix::Zero(static_cast<Eigen::Index>(m) * m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        if (!directed && j < i) {
          S.row(i + m * j) = S.row(j + m * i);
          continue;
        }
        S(i + m * j, 0) = 1.0;
        S(i + m * j, 1) = rng.normal();
      }
    dyad = S;
  }
  if (!saturated_nodes) {
    Matrix S(m, 2);
    for (int i = 0; i < m; ++i) S.row(i) << 1.0, rng.normal();
    node = S;
  }
  return mcr::CovariateSpec(m, directed, dyad, node);
}

/// Stable random parameters (spectral radius of the dynamics well below 1).
inline mcr::McrParams random_params(mcr::Rng& rng, const mcr::ModelMode& mode, const mcr::CovariateSpec& cov, int p) {
  const int m = cov.nodes();
  mcr::McrParams th = mcr::McrParams::zeros(mode, cov.dyad_dim(), cov.node_dim(), p);
  th.gamma = random_matrix(rng, cov.dyad_dim(), 1, 0.5);
  if (mode.autoregression) {
    th.alpha1 = 0.3 + 0.3 * rng.uniform();
    if (mode.directed) th.alpha2 = 0.2 * rng.uniform() - 0.1;
  }
  if (p > 0) {
    Matrix H = random_matrix(rng, p, p, 0.08);
    if (!mode.directed) H = 0.5 * (H + H.transpose()).eval();
    if (mode.diagonal_homophily()) H = Matrix(H.diagonal().asDiagonal());
    th.H = H;
    th.Gamma = random_matrix(rng, p, cov.node_dim(), 0.5);
    th.A = 0.4 * Matrix::Identity(p, p) + random_matrix(rng, p, p, 0.1);
    if (mode.contagion) {
      th.C1 = random_matrix(rng, p, p, 0.05 / m);
      if (mode.directed) th.C2 = random_matrix(rng, p, p, 0.05 / m);
    }
    if (!mode.unit_attribute_covariance()) {
      const Matrix L = Matrix::Identity(p, p) + random_matrix(rng, p, p, 0.2).triangularView<Eigen::StrictlyLower>().toDenseMatrix();
      th.Sigma = L * L.transpose();
    }
  }
  if (!mode.unit_network_variance()) th.sigma2 = 0.5 + rng.uniform();
  return th;
}

inline mcr::Simulation simulate_random(std::uint64_t seed, int m, int n, int p, const mcr::ModelMode& mode,
                                       bool saturated_dyads = true, bool saturated_nodes = true) {
  mcr::Rng rng(seed, 99);
  mcr::SimConfig c;
  c.m = m;
  c.n = n;
  c.p = p;
  c.mode = mode;
  c.covariates = random_covariates(rng, m, mode.directed, saturated_dyads, saturated_nodes);
  c.params = random_params(rng, mode, *c.covariates, p);
  c.seed = seed;
  return mcr::simulate(c);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_support
