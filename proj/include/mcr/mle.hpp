#pragma once

#include <span>
#include <string>

#include "mcr/normal_equations.hpp"

namespace mcr {

struct SolveOptions {
  double condition_cap = 1e12;
  /// Use an eigen pseudo-inverse instead of failing when Q is ill-conditioned.
  bool pseudo_inverse_fallback = false;
};

struct NetworkSolution {
  Vector beta;
  double sigma2 = 0.0;
  double rss = 0.0;
  double condition_number = 0.0;
  Vector standard_errors;
};

struct AttributeSolution {
  Matrix B;
  Matrix Sigma;
  Matrix rss;
  double condition_number = 0.0;
  Matrix standard_errors;  // same shape as B
};

/// beta = Q^{-1} l, sigma2 = RSS / count.
NetworkSolution solve_network_mle(const NormalEquations& ne, const SolveOptions& options = {},
                                  std::span<const std::string> column_names = {});
/// B = L Q^{-1}, Sigma = RSS / count.
AttributeSolution solve_attribute_mle(const NormalEquations& ne, const SolveOptions& options = {},
                                      std::span<const std::string> column_names = {});

struct MleFit {
  McrParams params;
  double rss_network = 0.0;
  Matrix rss_attributes;
  long dyad_count = 0;
  long node_time_count = 0;
  double network_condition = 0.0;
  double attribute_condition = 0.0;
  Vector beta_standard_errors;
  Matrix B_standard_errors;
};

/// Conditional (on slice 0) maximum likelihood fit of the Gaussian model.
MleFit fit_mle(const Panel& data, const ModelMode& mode, const SolveOptions& options = {},
               Execution exec = Execution::parallel);
inline MleFit fit_mle(const Dataset& data, const ModelMode& mode, const SolveOptions& options = {}) {
  return fit_mle(data.panel(), mode, options);
}

/// Solves Q x = rhs (rhs may have several columns) with the condition guard.
/// Returns the condition number through cond_out.
Matrix guarded_solve(const Matrix& Q, const Matrix& rhs, const SolveOptions& options,
                     std::span<const std::string> column_names, double& cond_out, Matrix* inverse_out = nullptr);

}  // namespace mcr
