#pragma once

// Reference computations for tests. Written directly from the model
// equations without the library's design-row helpers.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "mcr/core.hpp"
#include "mcr/random.hpp"

namespace oracle {

using mcr::Matrix;
using mcr::Vector;

struct Coefficients {
  Vector gamma;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Matrix H;
  Matrix Gamma, A, C1, C2;
};

inline bool undirected_pair(bool directed, int i, int j) { return directed ? i != j : i < j; }

/// Stacks every regression row explicitly and solves by column-pivoted QR.
inline Coefficients stacked_least_squares(const mcr::Dataset& data, const mcr::ModelMode& mode) {
  const auto& net = data.network;
  const auto& cov = data.covariates;
  const int m = net.nodes();
  const int T = net.time_points();
  const int p = data.attributes.dims();
  const bool dir = mode.directed;
  const int q = cov.dyad_dim();

  // homophily basis pairs (k, l)
  std::vector<std::pair<int, int>> basis;
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l) {
      if (mode.diagonal_homophily() && k != l) continue;
      if (!dir && l < k) continue;
      basis.emplace_back(k, l);
    }
  const int n_ar = mode.autoregression ? (dir ? 2 : 1) : 0;
  const int d = q + n_ar + static_cast<int>(basis.size());

  std::vector<Vector> rows;
  std::vector<double> resp;
  for (int t = 1; t < T; ++t)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (!undirected_pair(dir, i, j)) continue;
        Vector w = Vector::Zero(d);
        w.head(q) = cov.dyad(i, j);
        int c = q;
        if (mode.autoregression) {
          w(c++) = net(t - 1, i, j);
          if (dir) w(c++) = net(t - 1, j, i);
        }
        for (auto [k, l] : basis) {
          const Matrix& X = data.attributes.slice(t - 1);
          double v = X(i, k) * X(j, l);
          if (!dir && k != l) v += X(i, l) * X(j, k);
          w(c++) = v;
        }
        rows.push_back(w);
        resp.push_back(net(t, i, j));
      }
  Matrix W(static_cast<Eigen::Index>(rows.size()), d);
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    W.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    y(static_cast<Eigen::Index>(r)) = resp[r];
  }
  const Vector beta = W.colPivHouseholderQr().solve(y);

  Coefficients out;
  out.gamma = beta.head(q);
  int c = q;
  if (mode.autoregression) {
    out.alpha1 = beta(c++);
    if (dir) out.alpha2 = beta(c++);
  }
  out.H = Matrix::Zero(p, p);
  for (auto [k, l] : basis) {
    out.H(k, l) = beta(c);
    if (!dir) out.H(l, k) = beta(c);
    ++c;
  }

  if (p == 0) return out;
  const int qn = cov.node_dim();
  const int n_c = mode.contagion ? (dir ? 2 : 1) : 0;
  const int da = qn + p + n_c * p;
  Matrix WA((T - 1) * m, da);
  Matrix R((T - 1) * m, p);
  int r = 0;
  for (int t = 1; t < T; ++t) {
    const Matrix& X = data.attributes.slice(t - 1);
    for (int i = 0; i < m; ++i, ++r) {
      Vector w = Vector::Zero(da);
      w.head(qn) = cov.node(i);
      w.segment(qn, p) = X.row(i).transpose();
      if (mode.contagion) {
        Vector out_ties = Vector::Zero(p);
        Vector in_ties = Vector::Zero(p);
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          out_ties += net(t - 1, i, j) * X.row(j).transpose();
          in_ties += net(t - 1, j, i) * X.row(j).transpose();
        }
        w.segment(qn + p, p) = out_ties;
        if (dir) w.segment(qn + 2 * p, p) = in_ties;
      }
      WA.row(r) = w.transpose();
      R.row(r) = data.attributes.slice(t).row(i);
    }
  }
  const Matrix B = WA.colPivHouseholderQr().solve(R).transpose();
  out.Gamma = B.leftCols(qn);
  out.A = B.middleCols(qn, p);
  out.C1 = mode.contagion ? Matrix(B.middleCols(qn + p, p)) : Matrix::Zero(p, p);
  out.C2 = mode.contagion && dir ? Matrix(B.middleCols(qn + 2 * p, p)) : Matrix::Zero(p, p);
  return out;
}

/// Which prior pieces enter the joint density.
struct JointSpec {
  std::optional<std::pair<double, double>> z_prior;  // (mean, variance) on every latent relation
  bool z_prior_initial_only = false;
  std::optional<Vector> gamma0;                     // z_{ij,0} ~ N(gamma0' s_ij, sigma2)
  bool x_anchor = true;                             // x_{i,0} ~ N(0, I)
  std::optional<std::pair<Matrix, Vector>> x_initial; // x_{i,0} ~ N(row i, diag), replaces the anchor
  std::optional<std::pair<double, double>> x_prior; // (mean, variance) on every attribute entry
  Matrix sigma_inverse;                             // attribute error precision
};

/// Log joint density (up to a constant) of relations Z and attributes X.
inline double joint_log_density(const std::vector<Matrix>& Z, const std::vector<Matrix>& X, const mcr::CovariateSpec& cov,
                                const mcr::McrParams& th, const mcr::ModelMode& mode, const JointSpec& spec) {
  const int T = static_cast<int>(Z.size());
  const int m = static_cast<int>(Z[0].rows());
  const int p = X.empty() ? 0 : static_cast<int>(X[0].cols());
  const bool dir = mode.directed;
  double lp = 0.0;
  const double s2 = th.sigma2;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (!undirected_pair(dir, i, j)) continue;
        const double z = Z[t](i, j);
        if (spec.z_prior && (!spec.z_prior_initial_only || t == 0)) {
          const double e = z - spec.z_prior->first;
          lp -= 0.5 * e * e / spec.z_prior->second;
        }
        if (t == 0) {
          if (spec.gamma0) {
            const double e = z - spec.gamma0->dot(cov.dyad(i, j));
            lp -= 0.5 * e * e / s2;
          }
          continue;
        }
        double mu = th.gamma.dot(cov.dyad(i, j));
        if (mode.autoregression) {
          mu += th.alpha1 * Z[t - 1](i, j);
          if (dir) mu += *th.alpha2 * Z[t - 1](j, i);
        }
        if (p > 0) mu += X[t - 1].row(i).dot(th.H * X[t - 1].row(j).transpose());
        const double e = z - mu;
        lp -= 0.5 * e * e / s2;
      }
  for (int t = 0; t < T && p > 0; ++t)
    for (int i = 0; i < m; ++i) {
      const Vector x = X[t].row(i).transpose();
      if (spec.x_prior) {
        const Vector e = x.array() - spec.x_prior->first;
        lp -= 0.5 * e.squaredNorm() / spec.x_prior->second;
      }
      if (t == 0) {
        if (spec.x_initial) {
          const Vector e = x - spec.x_initial->first.row(i).transpose();
          lp -= 0.5 * e.cwiseQuotient(spec.x_initial->second).dot(e);
        } else if (spec.x_anchor) {
          lp -= 0.5 * x.squaredNorm();
        }
        continue;
      }
      Vector mu = th.Gamma * cov.node(i) + th.A * X[t - 1].row(i).transpose();
      if (mode.contagion)
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          mu += Z[t - 1](i, j) * (th.C1 * X[t - 1].row(j).transpose());
          if (dir) mu += Z[t - 1](j, i) * (*th.C2 * X[t - 1].row(j).transpose());
        }
      const Vector e = x - mu;
      lp -= 0.5 * e.dot(spec.sigma_inverse * e);
    }
  return lp;
}

struct Moments {
  Vector mean;
  Matrix covariance;
};

/// Gaussian conditional of a quadratic log density f(u) around u = 0,
/// recovered exactly (up to rounding) by unit finite differences.
template <class F>
Moments quadratic_conditional(F&& f, int dim) {
  const double f0 = f(Vector::Zero(dim));
  Matrix P(dim, dim);
  Vector l(dim);
  std::vector<double> plus(dim), minus(dim);
  for (int k = 0; k < dim; ++k) {
    const Vector e = Vector::Unit(dim, k);
    plus[k] = f(e);
    minus[k] = f(-e);
    P(k, k) = -(plus[k] - 2.0 * f0 + minus[k]);
    l(k) = 0.5 * (plus[k] - minus[k]);
  }
  for (int k = 0; k < dim; ++k)
    for (int j = k + 1; j < dim; ++j) {
      const double fkj = f(Vector::Unit(dim, k) + Vector::Unit(dim, j));
      // f(e_k + e_j) = f0 + l_k + l_j - (P_kk + P_jj)/2 - P_kj
      P(k, j) = P(j, k) = -(fkj - f0 - l(k) - l(j) + 0.5 * (P(k, k) + P(j, j)));
    }
  Moments out;
  out.covariance = P.inverse();
  out.mean = out.covariance * l;
  return out;
}

/// Analytic moments of N(mu, sd^2) truncated to (a, b).
inline std::pair<double, double> truncated_moments(double mu, double sd, double a, double b) {
  const auto phi = [](double x) { return std::isinf(x) ? 0.0 : std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  const auto xphi = [&](double x) { return std::isinf(x) ? 0.0 : x * phi(x); };
  const double al = (a - mu) / sd;
  const double be = (b - mu) / sd;
  // tail-safe mass
  double Z;
  if (al > 0.0) Z = 0.5 * (std::erfc(al / std::sqrt(2.0)) - std::erfc(be / std::sqrt(2.0)));
  else if (be < 0.0) Z = 0.5 * (std::erfc(-be / std::sqrt(2.0)) - std::erfc(-al / std::sqrt(2.0)));
  else Z = 1.0 - 0.5 * std::erfc(-al / std::sqrt(2.0)) - 0.5 * std::erfc(be / std::sqrt(2.0));
  const double r = (phi(al) - phi(be)) / Z;
  const double mean = mu + sd * r;
  const double var = sd * sd * (1.0 + (xphi(al) - xphi(be)) / Z - r * r);
  return {mean, var};
}

}  // namespace oracle
