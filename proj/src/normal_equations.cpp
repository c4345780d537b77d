#include "mcr/normal_equations.hpp"

#include <algorithm>

#include <omp.h>

namespace mcr {

NormalEquations NormalEquations::zeros(int responses, int regressors) {
  NormalEquations ne;
  ne.Q = Matrix::Zero(regressors, regressors);
  ne.L = Matrix::Zero(responses, regressors);
  ne.S = Matrix::Zero(responses, responses);
  ne.count = 0;
  return ne;
}

NormalEquations& NormalEquations::merge(const NormalEquations& other) {
  if (other.Q.rows() != Q.rows() || other.L.rows() != L.rows())
    throw DimensionError("cannot merge normal equations of different shapes");
  Q += other.Q;
  L += other.L;
  S += other.S;
  count += other.count;
  return *this;
}

Matrix NormalEquations::residual_cross_product(const Matrix& coef) const {
  const Matrix cross = coef * L.transpose();
  Matrix rss = S - cross - cross.transpose() + coef * Q * coef.transpose();
  return 0.5 * (rss + rss.transpose());
}

namespace {

bool network_row_usable(const Panel& data, const ModelMode& mode, int i, int j, int t) {
  if (data.fully_observed()) return true;
  if (!data.observed(t, i, j)) return false;
  if (mode.autoregression) {
    if (!data.observed(t - 1, i, j)) return false;
    if (mode.directed && !data.observed(t - 1, j, i)) return false;
  }
  return true;
}

bool attribute_row_usable(const Panel& data, const ModelMode& mode, int i, int t) {
  if (data.fully_observed() || !mode.contagion) return true;
  for (int k = 0; k < data.nodes(); ++k) {
    if (k == i) continue;
    if (!data.observed(t - 1, i, k)) return false;
    if (mode.directed && !data.observed(t - 1, k, i)) return false;
  }
  return true;
}

template <typename SliceFn>
NormalEquations accumulate(const Panel& data, int responses, int regressors, Execution exec, SliceFn&& slice) {
  const int T = data.time_points();
  if (T < 2) throw ValidationError("need at least two time points (n >= 1) to accumulate normal equations");
  NormalEquations total = NormalEquations::zeros(responses, regressors);
  if (exec == Execution::serial) {
    for (int t = 1; t < T; ++t) slice(t, total);
    return total;
  }
  const int n = T - 1;
  const int chunks = std::min(kAccumulationChunks, n);
  std::vector<NormalEquations> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    partial[c] = NormalEquations::zeros(responses, regressors);
    const int begin = 1 + static_cast<int>(static_cast<long>(n) * c / chunks);
    const int end = 1 + static_cast<int>(static_cast<long>(n) * (c + 1) / chunks);
    for (int t = begin; t < end; ++t) slice(t, partial[c]);
  }
  for (const auto& part : partial) total.merge(part);
  return total;
}

}  // namespace

void accumulate_network_slice(const Panel& data, const ModelMode& mode, int t, NormalEquations& ne) {
  const CovariateSpec& cov = data.covariates();
  const int m = data.nodes();
  const int q = cov.dyad_dim();
  const int k = network_dynamic_length(data.dims(), mode);
  Vector dyn(k);
  if (cov.saturated_dyads()) {
    for (int i = 0; i < m; ++i) {
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j || !network_row_usable(data, mode, i, j, t)) continue;
        const double y = data.y(t, i, j);
        const int s = cov.dyad_index(i, j);
        network_dynamic_part(data, i, j, t, mode, dyn);
        ne.Q(s, s) += 1.0;
        ne.Q.block(q, s, k, 1) += dyn;
        ne.Q.block(s, q, 1, k) += dyn.transpose();
        ne.Q.bottomRightCorner(k, k).noalias() += dyn * dyn.transpose();
        ne.L(0, s) += y;
        ne.L.block(0, q, 1, k) += y * dyn.transpose();
        ne.S(0, 0) += y * y;
        ++ne.count;
      }
    }
    return;
  }
  Vector w(q + k);
  for (int i = 0; i < m; ++i) {
    for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
      if (i == j || !network_row_usable(data, mode, i, j, t)) continue;
      const double y = data.y(t, i, j);
      w.head(q) = cov.dyad_matrix()->row(i + m * j).transpose();
      network_dynamic_part(data, i, j, t, mode, w.tail(k));
      ne.Q.noalias() += w * w.transpose();
      ne.L.noalias() += y * w.transpose();
      ne.S(0, 0) += y * y;
      ++ne.count;
    }
  }
}

void accumulate_attribute_slice(const Panel& data, const ModelMode& mode, int t, NormalEquations& ne) {
  const int m = data.nodes();
  const Matrix& X = data.X(t);
  for (int i = 0; i < m; ++i) {
    if (!attribute_row_usable(data, mode, i, t)) continue;
    const Vector w = attribute_design_row(data, i, t, mode);
    const Vector x = X.row(i).transpose();
    ne.Q.noalias() += w * w.transpose();
    ne.L.noalias() += x * w.transpose();
    ne.S.noalias() += x * x.transpose();
    ++ne.count;
  }
}

NormalEquations accumulate_network_normal_equations(const Panel& data, const ModelMode& mode, Execution exec) {
  if (mode.directed != data.directed()) throw DimensionError("mode direction disagrees with the data");
  const int d = network_row_length(data.covariates().dyad_dim(), data.dims(), mode);
  return accumulate(data, 1, d, exec,
                    [&](int t, NormalEquations& ne) { accumulate_network_slice(data, mode, t, ne); });
}

NormalEquations accumulate_attribute_normal_equations(const Panel& data, const ModelMode& mode, Execution exec) {
  if (mode.directed != data.directed()) throw DimensionError("mode direction disagrees with the data");
  if (data.dims() == 0) throw ValidationError("attribute normal equations need p >= 1");
  const int d = attribute_row_length(data.covariates().node_dim(), data.dims(), mode);
  return accumulate(data, data.dims(), d, exec,
                    [&](int t, NormalEquations& ne) { accumulate_attribute_slice(data, mode, t, ne); });
}

}  // namespace mcr
