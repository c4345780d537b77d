#pragma once

#include "mcr/core.hpp"

namespace mcr {

/// Sufficient statistics of a multivariate linear regression r = coef * w + e:
///   Q = sum w w',  L = sum r w',  S = sum r r'.
/// The network regression has a single response (L is 1 x d, L' = l).
struct NormalEquations {
  Matrix Q;
  Matrix L;
  Matrix S;
  long count = 0;

  static NormalEquations zeros(int responses, int regressors);
  int regressors() const { return static_cast<int>(Q.rows()); }
  int responses() const { return static_cast<int>(L.rows()); }
  Vector l() const { return L.row(0).transpose(); }

  NormalEquations& merge(const NormalEquations& other);
  /// Residual cross-product S - coef L' - L coef' + coef Q coef'.
  Matrix residual_cross_product(const Matrix& coef) const;
};

enum class Execution { serial, parallel };

/// Network regression over t = 1..n, pairs i<j (undirected) or i != j (directed).
/// Rows whose response or lagged dyad values are unobserved are skipped.
NormalEquations accumulate_network_normal_equations(const Panel& data, const ModelMode& mode,
                                                    Execution exec = Execution::parallel);
/// Attribute regression over t = 1..n and all nodes. Rows whose lagged network
/// row (or column, directed) has unobserved entries are skipped when the
/// contagion term is active.
NormalEquations accumulate_attribute_normal_equations(const Panel& data, const ModelMode& mode,
                                                      Execution exec = Execution::parallel);

/// Single-slice kernels; the parallel drivers merge these over fixed time chunks.
void accumulate_network_slice(const Panel& data, const ModelMode& mode, int t, NormalEquations& ne);
void accumulate_attribute_slice(const Panel& data, const ModelMode& mode, int t, NormalEquations& ne);

/// Number of fixed time chunks used by the parallel drivers. The chunking does
/// not depend on the thread count, so results are bit-identical for any
/// number of threads.
inline constexpr int kAccumulationChunks = 16;

}  // namespace mcr
