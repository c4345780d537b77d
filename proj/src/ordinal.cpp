#include "mcr/ordinal.hpp"

#include <algorithm>
#include <cmath>

namespace mcr {

OrdinalMode parse_ordinal_mode(const std::string& s) {
  if (s == "auto" || s == "automatic") return OrdinalMode::automatic;
  if (s == "rank") return OrdinalMode::rank;
  if (s == "threshold") return OrdinalMode::threshold;
  throw ValidationError("unknown ordinal mode '" + s + "' (expected auto|rank|threshold)");
}

std::string to_string(OrdinalMode mode) {
  switch (mode) {
    case OrdinalMode::automatic: return "auto";
    case OrdinalMode::rank: return "rank";
    case OrdinalMode::threshold: return "threshold";
  }
  return "auto";
}

OrdinalMode resolve_ordinal_mode(OrdinalMode mode, int categories) {
  if (mode != OrdinalMode::automatic) return mode;
  return categories <= 10 ? OrdinalMode::threshold : OrdinalMode::rank;
}

// --- thresholds and levels -------------------------------------------------------

int Thresholds::category_of(double z) const {
  // category c occupies (h_c, h_{c+1}]
  const auto it = std::lower_bound(cuts.begin() + 1, cuts.end() - 1, z);
  return static_cast<int>(it - cuts.begin()) - 1;
}

Thresholds Thresholds::from_proportions(std::span<const long> counts) {
  const int q = static_cast<int>(counts.size());
  if (q < 1) throw ValidationError("ordinal variable needs at least one category");
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  Thresholds th;
  th.cuts.assign(static_cast<std::size_t>(q + 1), 0.0);
  th.cuts.front() = -kInf;
  th.cuts.back() = kInf;
  double cum = 0.0;
  for (int c = 1; c < q; ++c) {
    cum += total > 0.0 ? static_cast<double>(counts[c - 1]) / total : 1.0 / q;
    const double pr = std::clamp(cum, 1e-4, 1.0 - 1e-4);
    double h = normal_quantile(pr);
    if (c > 1 && h <= th.cuts[c - 1] + 1e-3) h = th.cuts[c - 1] + 1e-3;
    th.cuts[c] = h;
  }
  return th;
}

bool Thresholds::strictly_increasing() const {
  for (std::size_t c = 1; c < cuts.size(); ++c)
    if (!(cuts[c] > cuts[c - 1])) return false;
  return true;
}

int OrdinalLevels::index_of(double value) const {
  const auto it = std::lower_bound(levels.begin(), levels.end(), value);
  if (it == levels.end() || *it != value)
    throw ValidationError("ordinal value " + std::to_string(value) + " is not one of the declared levels");
  return static_cast<int>(it - levels.begin());
}

namespace {

OrdinalLevels distinct_levels(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw ValidationError("ordinal variable has no observed values");
  return OrdinalLevels{std::move(values)};
}

}  // namespace

NetworkCoding NetworkCoding::build(const NetworkSeries& network, std::optional<OrdinalLevels> levels) {
  const int m = network.nodes();
  NetworkCoding coding;
  coding.directed = network.directed();
  if (levels) {
    coding.levels = std::move(*levels);
  } else {
    std::vector<double> values;
    for (int t = 0; t < network.time_points(); ++t)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (i != j && network.observed(t, i, j)) values.push_back(network(t, i, j));
    coding.levels = distinct_levels(std::move(values));
  }
  for (int t = 0; t < network.time_points(); ++t) {
    Eigen::MatrixXi cls = Eigen::MatrixXi::Constant(m, m, -1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && network.observed(t, i, j)) cls(i, j) = coding.levels.index_of(network(t, i, j));
    coding.classes.push_back(std::move(cls));
  }
  return coding;
}

std::vector<long> NetworkCoding::class_counts() const {
  std::vector<long> counts(static_cast<std::size_t>(levels.categories()), 0);
  for (const auto& cls : classes) {
    const Eigen::Index m = cls.rows();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        if (i == j || cls(i, j) < 0) continue;
        if (directed || i < j) ++counts[cls(i, j)];
      }
  }
  return counts;
}

AttributeCoding AttributeCoding::build(const AttributeSeries& attributes, const std::vector<OrdinalLevels>& levels) {
  const int p = attributes.dims();
  const int m = attributes.nodes();
  AttributeCoding coding;
  if (!levels.empty()) {
    if (static_cast<int>(levels.size()) != p) throw DimensionError("one level set per ordinal attribute is required");
    coding.levels = levels;
  } else {
    for (int k = 0; k < p; ++k) {
      std::vector<double> values;
      for (int t = 0; t < attributes.time_points(); ++t)
        for (int i = 0; i < m; ++i) values.push_back(attributes(t, i, k));
      coding.levels.push_back(distinct_levels(std::move(values)));
    }
  }
  for (int t = 0; t < attributes.time_points(); ++t) {
    Eigen::MatrixXi cls(m, p);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < p; ++k) cls(i, k) = coding.levels[k].index_of(attributes(t, i, k));
    coding.classes.push_back(std::move(cls));
  }
  return coding;
}

std::vector<long> AttributeCoding::class_counts(int k) const {
  std::vector<long> counts(static_cast<std::size_t>(levels[k].categories()), 0);
  for (const auto& cls : classes)
    for (Eigen::Index i = 0; i < cls.rows(); ++i) ++counts[cls(i, k)];
  return counts;
}

// --- rank index ------------------------------------------------------------------

void RankIndex::replace(int category, double old_value, double new_value) {
  auto& set = members_[category];
  const auto it = set.find(old_value);
  if (it == set.end()) throw NumericalError("rank index out of sync with the latent values");
  set.erase(it);
  set.insert(new_value);
}

std::pair<double, double> RankIndex::bounds(int category) const {
  double lower = -kInf;
  double upper = kInf;
  for (int c = category - 1; c >= 0; --c)
    if (!members_[c].empty()) {
      lower = *members_[c].rbegin();
      break;
    }
  for (int c = category + 1; c < categories(); ++c)
    if (!members_[c].empty()) {
      upper = *members_[c].begin();
      break;
    }
  return {lower, upper};
}

std::pair<double, double> RankIndex::extrema(int category) const {
  const auto& set = members_[category];
  if (set.empty()) return {kInf, -kInf};
  return {*set.begin(), *set.rbegin()};
}

// --- latent relations --------------------------------------------------------------

ScalarConditional z_full_conditional(const Panel& w, const McrParams& params, const ModelMode& mode,
                                     const Matrix& sigma_inverse, const LatentEntryPrior& prior,
                                     const Vector* initial_gamma, int i, int j, int t, const Matrix* next_means) {
  const int T = w.time_points();
  const int p = w.dims();
  const double inv_s2 = 1.0 / params.sigma2;
  double precision = 0.0;
  double linear = 0.0;
  if (prior.applies(t) && std::isfinite(prior.variance)) {
    precision += 1.0 / prior.variance;
    linear += prior.mean / prior.variance;
  }
  if (t >= 1) {
    precision += inv_s2;
    linear += inv_s2 * network_mean(w, params, mode, i, j, t);
  } else if (initial_gamma) {
    precision += inv_s2;
    linear += inv_s2 * w.covariates().dyad_effect(*initial_gamma, i, j);
  }
  if (t + 1 < T) {
    const double z = w.y(t, i, j);
    if (mode.autoregression) {
      const double a1 = params.alpha1;
      const double r1 = w.y(t + 1, i, j) - (network_mean(w, params, mode, i, j, t + 1) - a1 * z);
      precision += a1 * a1 * inv_s2;
      linear += a1 * r1 * inv_s2;
      if (mode.directed) {
        const double a2 = params.alpha2.value_or(0.0);
        const double r2 = w.y(t + 1, j, i) - (network_mean(w, params, mode, j, i, t + 1) - a2 * z);
        precision += a2 * a2 * inv_s2;
        linear += a2 * r2 * inv_s2;
      }
    }
    if (mode.contagion && p > 0) {
      const Matrix& Xt = w.X(t);
      // x_{i,t+1} gains C1 x_j z_ij; x_{j,t+1} gains C2 x_i z_ij (C x_i when undirected).
      const Vector gi = params.C1 * Xt.row(j).transpose();
      const Vector gj = (mode.directed ? *params.C2 : params.C1) * Xt.row(i).transpose();
      const Vector mi = next_means ? Vector(next_means->row(i).transpose()) : attribute_mean(w, params, mode, i, t + 1);
      const Vector mj = next_means ? Vector(next_means->row(j).transpose()) : attribute_mean(w, params, mode, j, t + 1);
      const Vector ri = w.X(t + 1).row(i).transpose() - (mi - gi * z);
      const Vector rj = w.X(t + 1).row(j).transpose() - (mj - gj * z);
      const Vector Si_gi = sigma_inverse * gi;
      const Vector Si_gj = sigma_inverse * gj;
      precision += gi.dot(Si_gi) + gj.dot(Si_gj);
      linear += Si_gi.dot(ri) + Si_gj.dot(rj);
    }
  }
  if (!(precision > 0.0)) throw NumericalError("latent relation full conditional has no information");
  return {linear / precision, 1.0 / precision};
}

std::pair<double, double> rank_bounds_scan(const std::vector<Matrix>& Z, const NetworkCoding& coding, bool directed,
                                           int i, int j, int t) {
  const int c = coding.classes[t](i, j);
  double lower = -kInf;
  double upper = kInf;
  for (std::size_t s = 0; s < Z.size(); ++s) {
    const Eigen::Index m = Z[s].rows();
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index l = directed ? 0 : k + 1; l < m; ++l) {
        if (k == l) continue;
        if (static_cast<int>(s) == t && ((k == i && l == j) || (!directed && k == j && l == i))) continue;
        const int d = coding.classes[s](k, l);
        if (d < 0) continue;
        if (d < c) lower = std::max(lower, Z[s](k, l));
        if (d > c) upper = std::min(upper, Z[s](k, l));
      }
  }
  return {lower, upper};
}

NetworkLatentState make_network_latent_state(const NetworkSeries& network, OrdinalMode mode, std::vector<Matrix>& Z,
                                             Rng& rng, std::optional<OrdinalLevels> levels) {
  NetworkLatentState state;
  state.coding = NetworkCoding::build(network, std::move(levels));
  const int q = state.coding.levels.categories();
  state.mode = resolve_ordinal_mode(mode, q);
  state.cuts = Thresholds::from_proportions(state.coding.class_counts());
  state.index = RankIndex(q);

  const int m = network.nodes();
  const bool directed = network.directed();
  Z.assign(static_cast<std::size_t>(network.time_points()), Matrix::Zero(m, m));
  for (int t = 0; t < network.time_points(); ++t)
    for (int i = 0; i < m; ++i)
      for (int j = directed ? 0 : i + 1; j < m; ++j) {
        if (i == j) continue;
        const int c = state.coding.classes[t](i, j);
        if (c < 0) continue;
        const auto [lo, hi] = state.cuts.interval(c);
        const double z = truncated_normal(rng, 0.0, 1.0, lo, hi);
        Z[t](i, j) = z;
        if (!directed) Z[t](j, i) = z;
        if (state.mode == OrdinalMode::rank) state.index.insert(c, z);
      }
  return state;
}

void step_z_sweep(std::vector<Matrix>& Z, std::span<const Matrix> X, const CovariateSpec& covariates,
                  const McrParams& params, const ModelMode& mode, const LatentEntryPrior& prior,
                  const Vector* initial_gamma, NetworkLatentState* ordinal, const NetworkSeries& observed, Rng& rng) {
  if (!ordinal && observed.fully_observed()) return;
  const int m = observed.nodes();
  const bool directed = mode.directed;
  const int p = X.empty() ? 0 : static_cast<int>(X.front().cols());
  const Matrix sigma_inverse =
      p > 0 && !mode.unit_attribute_covariance() ? Matrix(params.Sigma.inverse()) : Matrix::Identity(p, p);
  const Panel working(Z, X, covariates, directed);
  const int T = static_cast<int>(Z.size());
  // attribute means of slice t + 1, patched as z_{ij,t} moves
  const bool track = mode.contagion && p > 0;
  Matrix next(m, p);
  for (int t = 0; t < T; ++t) {
    const bool tracked = track && t + 1 < T;
    if (tracked)
      for (int i = 0; i < m; ++i) next.row(i) = attribute_mean(working, params, mode, i, t + 1).transpose();
    for (int i = 0; i < m; ++i)
      for (int j = directed ? 0 : i + 1; j < m; ++j) {
        if (i == j) continue;
        const bool obs = observed.observed(t, i, j);
        if (obs && !ordinal) continue;
        const ScalarConditional cond = z_full_conditional(working, params, mode, sigma_inverse, prior, initial_gamma,
                                                          i, j, t, tracked ? &next : nullptr);
        const double sd = std::sqrt(cond.variance);
        double z;
        if (obs) {
          const int c = ordinal->coding.classes[t](i, j);
          const auto [lo, hi] = ordinal->mode == OrdinalMode::threshold ? ordinal->cuts.interval(c)
                                                                         : ordinal->index.bounds(c);
          if (!(lo < hi))
            throw NumericalError("degenerate ordinal interval at t=" + std::to_string(t) + " (" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
          z = truncated_normal(rng, cond.mean, sd, lo, hi);
          if (ordinal->mode == OrdinalMode::rank) ordinal->index.replace(c, Z[t](i, j), z);
        } else {
          z = cond.mean + sd * rng.normal();
        }
        if (tracked) {
          const double dz = z - Z[t](i, j);
          next.row(i) += dz * (params.C1 * X[t].row(j).transpose()).transpose();
          next.row(j) += dz * ((directed ? *params.C2 : params.C1) * X[t].row(i).transpose()).transpose();
        }
        Z[t](i, j) = z;
        if (!directed) Z[t](j, i) = z;
      }
  }
}

CategoryExtrema category_extrema(const std::vector<Matrix>& Z, const NetworkCoding& coding) {
  CategoryExtrema ext(static_cast<std::size_t>(coding.levels.categories()), {kInf, -kInf});
  for (std::size_t t = 0; t < Z.size(); ++t) {
    const Eigen::Index m = Z[t].rows();
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < m; ++i) {
        const int c = coding.classes[t](i, j);
        if (c < 0 || (!coding.directed && j < i)) continue;
        auto& [lo, hi] = ext[c];
        lo = std::min(lo, Z[t](i, j));
        hi = std::max(hi, Z[t](i, j));
      }
  }
  return ext;
}

CategoryExtrema category_extrema(const std::vector<Matrix>& W, const AttributeCoding& coding, int k) {
  CategoryExtrema ext(static_cast<std::size_t>(coding.levels[k].categories()), {kInf, -kInf});
  for (std::size_t t = 0; t < W.size(); ++t)
    for (Eigen::Index i = 0; i < W[t].rows(); ++i) {
      auto& [lo, hi] = ext[coding.classes[t](i, k)];
      lo = std::min(lo, W[t](i, k));
      hi = std::max(hi, W[t](i, k));
    }
  return ext;
}

void step_thresholds(Thresholds& cuts, const CategoryExtrema& extrema, double prior_mean, double prior_variance,
                     Rng& rng) {
  const int q = cuts.categories();
  const double sd = std::sqrt(prior_variance);
  for (int s = 1; s < q; ++s) {
    const double lower = std::max(cuts.cuts[s - 1], extrema[s - 1].second);
    const double upper = std::min(cuts.cuts[s + 1], extrema[s].first);
    if (!(lower < upper)) throw NumericalError("threshold interval collapsed for cut " + std::to_string(s));
    cuts.cuts[s] = truncated_normal(rng, prior_mean, sd, lower, upper);
  }
  if (!cuts.strictly_increasing()) throw NumericalError("threshold update produced crossing cuts");
}

// --- latent ordinal attributes ---------------------------------------------------------

AttributeLatentState make_attribute_latent_state(const AttributeSeries& attributes, OrdinalMode mode,
                                                 std::vector<Matrix>& W, Rng& rng,
                                                 const std::vector<OrdinalLevels>& levels) {
  AttributeLatentState state;
  state.coding = AttributeCoding::build(attributes, levels);
  const int p = attributes.dims();
  const int m = attributes.nodes();
  for (int k = 0; k < p; ++k) {
    const int q = state.coding.levels[k].categories();
    state.modes.push_back(resolve_ordinal_mode(mode, q));
    state.cuts.push_back(Thresholds::from_proportions(state.coding.class_counts(k)));
    state.index.emplace_back(q);
  }
  W.assign(static_cast<std::size_t>(attributes.time_points()), Matrix::Zero(m, p));
  for (int t = 0; t < attributes.time_points(); ++t)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < p; ++k) {
        const int c = state.coding.classes[t](i, k);
        const auto [lo, hi] = state.cuts[k].interval(c);
        const double w = truncated_normal(rng, 0.0, 1.0, lo, hi);
        W[t](i, k) = w;
        if (state.modes[k] == OrdinalMode::rank) state.index[k].insert(c, w);
      }
  return state;
}

void step_w_sweep(std::vector<Matrix>& W, std::span<const Matrix> Z, const CovariateSpec& covariates,
                  const McrParams& params, const ModelMode& mode, const AttributeAnchor& anchor,
                  AttributeLatentState& state, Rng& rng) {
  if (W.empty()) return;
  const int m = static_cast<int>(W.front().rows());
  const int p = static_cast<int>(W.front().cols());
  const Matrix identity = Matrix::Identity(p, p);
  const Panel working(Z, W, covariates, mode.directed);
  for (int t = 0; t < static_cast<int>(W.size()); ++t)
    for (int i = 0; i < m; ++i) {
      const InformationForm info = attribute_full_conditional(working, params, mode, identity, anchor, i, t);
      for (int k = 0; k < p; ++k) {
        const double pkk = info.precision(k, k);
        double rest = 0.0;
        for (int l = 0; l < p; ++l)
          if (l != k) rest += info.precision(k, l) * W[t](i, l);
        const double mean = (info.linear(k) - rest) / pkk;
        const double sd = 1.0 / std::sqrt(pkk);
        const int c = state.coding.classes[t](i, k);
        const auto [lo, hi] = state.modes[k] == OrdinalMode::threshold ? state.cuts[k].interval(c)
                                                                        : state.index[k].bounds(c);
        if (!(lo < hi)) throw NumericalError("degenerate ordinal attribute interval at t=" + std::to_string(t));
        const double w = truncated_normal(rng, mean, sd, lo, hi);
        if (state.modes[k] == OrdinalMode::rank) state.index[k].replace(c, W[t](i, k), w);
        W[t](i, k) = w;
      }
    }
  for (int k = 0; k < p; ++k)
    if (state.modes[k] == OrdinalMode::threshold)
      step_thresholds(state.cuts[k], category_extrema(W, state.coding, k), state.cut_mean, state.cut_variance, rng);
}

}  // namespace mcr
