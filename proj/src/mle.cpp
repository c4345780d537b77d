#include "mcr/mle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mcr {

Matrix guarded_solve(const Matrix& Q, const Matrix& rhs, const SolveOptions& options,
                     std::span<const std::string> column_names, double& cond_out, Matrix* inverse_out) {
  const Eigen::Index d = Q.rows();
  if (d == 0) {
    cond_out = 1.0;
    if (inverse_out) *inverse_out = Matrix(0, 0);
    return Matrix(0, rhs.cols());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  if (eig.info() != Eigen::Success) throw NumericalError("eigen decomposition of Q failed");
  const Vector& ev = eig.eigenvalues();
  const double lmax = ev(d - 1);
  const double lmin = ev(0);
  cond_out = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();

  if (!(cond_out <= options.condition_cap)) {
    if (options.pseudo_inverse_fallback) {
      const double cut = std::max(lmax, 0.0) / options.condition_cap;
      Vector inv = Vector::Zero(d);
      for (Eigen::Index k = 0; k < d; ++k)
        if (ev(k) > cut) inv(k) = 1.0 / ev(k);
      const Matrix pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
      if (inverse_out) *inverse_out = pinv;
      return pinv * rhs;
    }
    std::ostringstream msg;
    msg << "rank-deficient design: condition number " << cond_out << " exceeds " << options.condition_cap
        << "; near-collinear columns:";
    const Vector v = eig.eigenvectors().col(0);
    int listed = 0;
    for (Eigen::Index k = 0; k < d && listed < 12; ++k) {
      if (std::abs(v(k)) > 0.1) {
        msg << ' ' << (static_cast<std::size_t>(k) < column_names.size() ? column_names[k] : "col" + std::to_string(k));
        ++listed;
      }
    }
    throw RankDeficiencyError(msg.str());
  }
  Eigen::LLT<Matrix> llt(Q);
  if (llt.info() != Eigen::Success) throw RankDeficiencyError("Cholesky factorization of Q failed");
  if (inverse_out) *inverse_out = llt.solve(Matrix::Identity(d, d));
  return llt.solve(rhs);
}

NetworkSolution solve_network_mle(const NormalEquations& ne, const SolveOptions& options,
                                  std::span<const std::string> column_names) {
  if (ne.responses() != 1) throw DimensionError("network normal equations must have a single response");
  if (ne.count == 0) throw ValidationError("no usable network rows (insufficient data)");
  NetworkSolution out;
  Matrix inv;
  out.beta = guarded_solve(ne.Q, ne.L.transpose(), options, column_names, out.condition_number, &inv).col(0);
  out.rss = std::max(0.0, ne.residual_cross_product(out.beta.transpose())(0, 0));
  out.sigma2 = out.rss / static_cast<double>(ne.count);
  out.standard_errors = (out.sigma2 * inv.diagonal().array().max(0.0)).sqrt().matrix();
  return out;
}

namespace {

Matrix clamp_psd(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
  const Vector ev = eig.eigenvalues().cwiseMax(0.0);
  Matrix out = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

AttributeSolution solve_attribute_mle(const NormalEquations& ne, const SolveOptions& options,
                                      std::span<const std::string> column_names) {
  if (ne.count == 0) throw ValidationError("no usable attribute rows (insufficient data)");
  AttributeSolution out;
  Matrix inv;
  out.B = guarded_solve(ne.Q, ne.L.transpose(), options, column_names, out.condition_number, &inv).transpose();
  out.rss = clamp_psd(ne.residual_cross_product(out.B));
  out.Sigma = out.rss / static_cast<double>(ne.count);
  const Vector qdiag = inv.diagonal().cwiseMax(0.0);
  out.standard_errors = (out.Sigma.diagonal().cwiseMax(0.0) * qdiag.transpose()).array().sqrt().matrix();
  return out;
}

MleFit fit_mle(const Panel& data, const ModelMode& mode, const SolveOptions& options, Execution exec) {
  if (mode.network_scale != NetworkScale::gaussian || mode.attribute_scale != AttributeScale::gaussian)
    throw ValidationError("MLE requires Gaussian, fully observed network and attributes");
  if (data.time_points() < 2) throw ValidationError("MLE needs n >= 1 transitions");
  const int p = data.dims();
  const int q_dyad = data.covariates().dyad_dim();
  const int q_node = data.covariates().node_dim();
  MleFit fit;
  fit.params = McrParams::zeros(mode, q_dyad, q_node, p);

  const auto net_names = network_column_names(q_dyad, p, mode);
  const NormalEquations net = accumulate_network_normal_equations(data, mode, exec);
  const NetworkSolution ns = solve_network_mle(net, options, net_names);
  unpack_beta(ns.beta, mode, fit.params);
  fit.params.sigma2 = ns.sigma2;
  fit.rss_network = ns.rss;
  fit.dyad_count = net.count;
  fit.network_condition = ns.condition_number;
  fit.beta_standard_errors = ns.standard_errors;

  if (p > 0) {
    const auto att_names = attribute_column_names(q_node, p, mode);
    const NormalEquations att = accumulate_attribute_normal_equations(data, mode, exec);
    const AttributeSolution as = solve_attribute_mle(att, options, att_names);
    unpack_B(as.B, mode, fit.params);
    // Residual cross-product straight from the residuals (PSD by construction).
    Matrix rss = Matrix::Zero(p, p);
    for (int t = 1; t < data.time_points(); ++t) {
      for (int i = 0; i < data.nodes(); ++i) {
        const Vector w = attribute_design_row(data, i, t, mode);
        bool usable = true;
        if (!data.fully_observed() && mode.contagion)
          for (int k = 0; k < data.nodes() && usable; ++k)
            if (k != i && (!data.observed(t - 1, i, k) || (mode.directed && !data.observed(t - 1, k, i))))
              usable = false;
        if (!usable) continue;
        const Vector e = data.X(t).row(i).transpose() - as.B * w;
        rss.noalias() += e * e.transpose();
      }
    }
    fit.rss_attributes = rss;
    fit.params.Sigma = rss / static_cast<double>(att.count);
    fit.node_time_count = att.count;
    fit.attribute_condition = as.condition_number;
    fit.B_standard_errors = as.standard_errors;
  } else {
    fit.rss_attributes = Matrix(0, 0);
  }
  return fit;
}

}  // namespace mcr
