#include "mcr/simulate.hpp"

#include <cmath>

namespace mcr {

namespace {

constexpr double kStabilityLimit = 1e8;

struct Stepper {
  const McrParams& params;
  const ModelMode& mode;
  const CovariateSpec& cov;
  double noise;
  Matrix sigma_chol;

  void advance(const Matrix& Y, const Matrix& X, Matrix& Ynext, Matrix& Xnext, Rng& rng) const {
    const int m = static_cast<int>(Y.rows());
    const int p = static_cast<int>(X.cols());
    const std::vector<Matrix> ys{Y, Y};
    const std::vector<Matrix> xs{X, X};
    const Panel panel(ys, xs, cov, mode.directed);
    const double sd = std::sqrt(params.sigma2) * noise;
    Ynext = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j) continue;
        const double v = network_mean(panel, params, mode, i, j, 1) + sd * rng.normal();
        Ynext(i, j) = v;
        if (!mode.directed) Ynext(j, i) = v;
      }
    Xnext = Matrix::Zero(m, p);
    for (int i = 0; i < m; ++i) {
      Vector x = attribute_mean(panel, params, mode, i, 1);
      if (p > 0) x += noise * (sigma_chol * rng.normal_vector(p));
      Xnext.row(i) = x.transpose();
    }
  }
};

bool out_of_range(const Matrix& M) {
  for (Eigen::Index k = 0; k < M.size(); ++k)
    if (!std::isfinite(M.data()[k]) || std::abs(M.data()[k]) > kStabilityLimit) return true;
  return false;
}

Matrix apply_cuts(const Matrix& Z, const std::vector<Thresholds>& cuts, bool per_column) {
  Matrix out = Z;
  for (Eigen::Index r = 0; r < Z.rows(); ++r)
    for (Eigen::Index c = 0; c < Z.cols(); ++c) out(r, c) = cuts[per_column ? c : 0].category_of(Z(r, c));
  return out;
}

Thresholds binary_cut() { return Thresholds{{-kInf, 0.0, kInf}}; }

}  // namespace

Simulation simulate(const SimConfig& config) {
  const int m = config.m;
  const int p = config.p;
  const ModelMode& mode = config.mode;
  if (m < 2) throw ValidationError("simulation needs m >= 2");
  if (config.n < 0) throw ValidationError("simulation needs n >= 0");
  if (config.burn_in < 0) throw ValidationError("burn-in must be non-negative");
  const CovariateSpec cov = config.covariates ? *config.covariates : CovariateSpec::saturated(m, mode.directed);
  if (cov.nodes() != m || cov.directed() != mode.directed) throw DimensionError("covariates disagree with m or direction");
  config.params.validate(mode, cov.dyad_dim(), cov.node_dim());
  if (config.params.dims() != p) throw DimensionError("parameter dimension disagrees with p");

  Rng rng(config.seed);
  Stepper stepper{config.params, mode, cov, config.noise_scale, Matrix()};
  if (p > 0) {
    Eigen::LLT<Matrix> llt(config.params.Sigma);
    if (llt.info() != Eigen::Success) throw ValidationError("Sigma is not positive definite");
    stepper.sigma_chol = llt.matrixL();
  }

  Matrix Y0 = Matrix::Zero(m, m);
  Matrix X0 = Matrix::Zero(m, p);
  if (config.initial_state) {
    Y0 = config.initial_state->first;
    X0 = config.initial_state->second;
    if (Y0.rows() != m || Y0.cols() != m || X0.rows() != m || X0.cols() != p)
      throw DimensionError("explicit initial state has the wrong shape");
  } else if (config.initial_regression) {
    const InitialStateParams& init = *config.initial_regression;
    const double sd = std::sqrt(config.params.sigma2) * config.noise_scale;
    for (int i = 0; i < m; ++i)
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j) continue;
        const double v = cov.dyad_effect(init.gamma0, i, j) + sd * rng.normal();
        Y0(i, j) = v;
        if (!mode.directed) Y0(j, i) = v;
      }
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < p; ++k)
        X0(i, k) = init.G0.row(k).dot(cov.node_matrix().row(i)) +
                   config.noise_scale * std::sqrt(init.tau2(k)) * rng.normal();
  } else {
    const double sd = std::sqrt(config.params.sigma2) * config.noise_scale;
    for (int i = 0; i < m; ++i)
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j) continue;
        const double v = cov.dyad_effect(config.params.gamma, i, j) + sd * rng.normal();
        Y0(i, j) = v;
        if (!mode.directed) Y0(j, i) = v;
      }
    for (int i = 0; i < m; ++i) {
      Vector x = config.params.Gamma * cov.node(i);
      if (p > 0) x += config.noise_scale * (stepper.sigma_chol * rng.normal_vector(p));
      X0.row(i) = x.transpose();
    }
    Matrix Yn, Xn;
    for (int b = 0; b < config.burn_in; ++b) {
      stepper.advance(Y0, X0, Yn, Xn, rng);
      if (out_of_range(Yn) || out_of_range(Xn))
        throw StabilityError(0, "simulation diverged during burn-in step " + std::to_string(b + 1));
      Y0 = std::move(Yn);
      X0 = std::move(Xn);
    }
  }
  for (int i = 0; i < m; ++i) Y0(i, i) = 0.0;

  Simulation sim;
  sim.Z.push_back(Y0);
  sim.W.push_back(X0);
  for (int t = 1; t <= config.n; ++t) {
    Matrix Yn, Xn;
    stepper.advance(sim.Z.back(), sim.W.back(), Yn, Xn, rng);
    if (out_of_range(Yn) || out_of_range(Xn))
      throw StabilityError(t, "simulated values exceed 1e8 at t=" + std::to_string(t));
    sim.Z.push_back(std::move(Yn));
    sim.W.push_back(std::move(Xn));
  }

  std::vector<Matrix> network;
  std::vector<Matrix> attributes;
  if (mode.network_scale == NetworkScale::ordinal) {
    const std::vector<Thresholds> cuts{config.network_cuts ? *config.network_cuts : binary_cut()};
    for (const Matrix& Z : sim.Z) {
      Matrix Y = apply_cuts(Z, cuts, false);
      Y.diagonal().setZero();
      network.push_back(std::move(Y));
    }
  } else {
    network = sim.Z;
  }
  if (mode.attribute_scale == AttributeScale::ordinal) {
    std::vector<Thresholds> cuts = config.attribute_cuts;
    if (cuts.empty()) cuts.assign(static_cast<std::size_t>(p), binary_cut());
    if (static_cast<int>(cuts.size()) != p) throw DimensionError("one cut vector per ordinal attribute is required");
    for (const Matrix& W : sim.W) attributes.push_back(apply_cuts(W, cuts, true));
  } else {
    attributes = sim.W;
  }
  sim.data.network = NetworkSeries(std::move(network), mode.directed);
  sim.data.attributes = AttributeSeries(std::move(attributes));
  sim.data.covariates = cov;
  return sim;
}

OneStepForecast forecast_one_step(const McrParams& params, const ModelMode& mode, const CovariateSpec& covariates,
                                  const Matrix& Y, const Matrix& X, const Thresholds* network_cuts) {
  const int m = static_cast<int>(Y.rows());
  if (Y.cols() != m || X.rows() != m || X.cols() != params.dims())
    throw DimensionError("forecast state disagrees with the parameters");
  const std::vector<Matrix> ys{Y, Y};
  const std::vector<Matrix> xs{X, X};
  const Panel panel(ys, xs, covariates, mode.directed);
  OneStepForecast f;
  f.network = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) f.network(i, j) = network_mean(panel, params, mode, i, j, 1);
  f.attributes = Matrix::Zero(m, params.dims());
  for (int i = 0; i < m; ++i) f.attributes.row(i) = attribute_mean(panel, params, mode, i, 1).transpose();
  if (network_cuts) {
    const double sd = std::sqrt(params.sigma2);
    for (int c = 0; c < network_cuts->categories(); ++c) {
      const auto [lo, hi] = network_cuts->interval(c);
      Matrix prob = Matrix::Zero(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          const double mu = f.network(i, j);
          const double upper = std::isinf(hi) ? 1.0 : normal_cdf((hi - mu) / sd);
          const double lower = std::isinf(lo) ? 0.0 : normal_cdf((lo - mu) / sd);
          prob(i, j) = upper - lower;
        }
      f.network_probabilities.push_back(std::move(prob));
    }
  }
  return f;
}

McrParams default_params(const ModelMode& mode, const CovariateSpec& covariates, int p) {
  const int m = covariates.nodes();
  McrParams params = McrParams::zeros(mode, covariates.dyad_dim(), covariates.node_dim(), p);
  params.alpha1 = 0.5;
  if (mode.directed) params.alpha2 = 0.1;
  if (p > 0) {
    params.H = 0.2 * Matrix::Identity(p, p);
    params.A = 0.5 * Matrix::Identity(p, p);
    params.C1 = (0.1 / m) * Matrix::Identity(p, p);
    if (mode.directed) params.C2 = (0.05 / m) * Matrix::Identity(p, p);
  }
  return params;
}

}  // namespace mcr
