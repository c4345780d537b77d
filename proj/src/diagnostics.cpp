#include "mcr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "mcr/simulate.hpp"

namespace mcr {

EssResult effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 100) throw ValidationError("effective sample size needs at least 100 draws");
  const double N = static_cast<double>(n);
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= N;
  std::vector<double> centred(n);
  for (std::size_t k = 0; k < n; ++k) centred[k] = chain[k] - mean;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) s += centred[k] * centred[k + lag];
    return s / N;
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0) || gamma0 <= 1e-300) return {N, true};

  // tau = -1 + 2 sum_m (gamma_{2m} + gamma_{2m+1}) / gamma_0
  double pair_sum = 0.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = autocov(lag) + autocov(lag + 1);
    if (pair <= 0.0) break;
    pair_sum += pair;
  }
  const double tau = -1.0 + 2.0 * pair_sum / gamma0;
  const double ess = tau > 0.0 ? N / tau : N;
  return {std::min(ess, N), false};
}

double quantile(std::span<const double> values, double prob) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("quantile probability outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

QuantileTable posterior_quantiles(const Matrix& draws, std::vector<std::string> names, std::vector<double> probs) {
  if (draws.rows() == 0) throw ValidationError("posterior quantiles of an empty sample");
  if (static_cast<Eigen::Index>(names.size()) != draws.cols())
    throw DimensionError("one name per parameter column is required");
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile probabilities must lie in (0, 1)");
  QuantileTable table{std::move(names), std::move(probs), Matrix(draws.cols(), 0)};
  table.values.resize(draws.cols(), static_cast<Eigen::Index>(table.probs.size()));
  std::vector<double> column(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index c = 0; c < draws.cols(); ++c) {
    for (Eigen::Index r = 0; r < draws.rows(); ++r) column[r] = draws(r, c);
    for (std::size_t k = 0; k < table.probs.size(); ++k) table.values(c, k) = quantile(column, table.probs[k]);
  }
  return table;
}

Matrix draw_matrix(const PosteriorSamples& samples) {
  if (samples.draws.empty()) return Matrix();
  const Vector first = scalar_parameters(samples.draws.front().params, samples.mode);
  Matrix out(static_cast<Eigen::Index>(samples.draws.size()), first.size());
  for (std::size_t r = 0; r < samples.draws.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = scalar_parameters(samples.draws[r].params, samples.mode).transpose();
  return out;
}

QuantileTable posterior_quantiles(const PosteriorSamples& samples, std::vector<double> probs) {
  if (samples.draws.empty()) throw ValidationError("posterior quantiles of an empty sample");
  return posterior_quantiles(draw_matrix(samples), scalar_parameter_names(samples.draws.front().params, samples.mode),
                             std::move(probs));
}

// --- decomposition -------------------------------------------------------------------

namespace {

void add_percentages(TermShares& acc, const TermShares& raw) {
  const double total = raw.total();
  acc.intercept += 100.0 * raw.intercept / total;
  acc.autoregressive += 100.0 * raw.autoregressive / total;
  acc.coupling += 100.0 * raw.coupling / total;
  acc.error += 100.0 * raw.error / total;
}

void scale(TermShares& s, double f) {
  s.intercept *= f;
  s.autoregressive *= f;
  s.coupling *= f;
  s.error *= f;
}

}  // namespace

DecompositionReport sum_of_squares_decomposition(const Panel& data, const McrParams& params, const ModelMode& mode) {
  const int m = data.nodes();
  const int p = data.dims();
  const CovariateSpec& cov = data.covariates();
  DecompositionReport report;
  int used = 0;
  for (int t = 1; t < data.time_points(); ++t) {
    TermShares raw;
    const Matrix& Xp = data.X(t - 1);
    for (int i = 0; i < m; ++i)
      for (int j = mode.directed ? 0 : i + 1; j < m; ++j) {
        if (i == j || !data.observed(t, i, j)) continue;
        const double icpt = cov.dyad_effect(params.gamma, i, j);
        double ar = 0.0;
        if (mode.autoregression) {
          ar = params.alpha1 * data.y(t - 1, i, j);
          if (mode.directed) ar += params.alpha2.value_or(0.0) * data.y(t - 1, j, i);
        }
        const double hom = p > 0 ? double(Xp.row(i) * params.H * Xp.row(j).transpose()) : 0.0;
        const double err = data.y(t, i, j) - icpt - ar - hom;
        raw.intercept += icpt * icpt;
        raw.autoregressive += ar * ar;
        raw.coupling += hom * hom;
        raw.error += err * err;
      }
    if (raw.total() > 0.0) {
      add_percentages(report.network, raw);
      ++used;
    }
  }
  if (used > 0) scale(report.network, 1.0 / used);

  if (p > 0) {
    TermShares acc;
    int used_attr = 0;
    for (int t = 1; t < data.time_points(); ++t) {
      TermShares raw;
      const Matrix& Xp = data.X(t - 1);
      const Matrix& Yp = data.Y(t - 1);
      for (int i = 0; i < m; ++i) {
        const Vector icpt = params.Gamma * cov.node(i);
        const Vector ar = params.A * Xp.row(i).transpose();
        Vector con = Vector::Zero(p);
        if (mode.contagion) {
          con += params.C1 * (Xp.transpose() * Yp.row(i).transpose());
          if (mode.directed) con += *params.C2 * (Xp.transpose() * Yp.col(i));
        }
        const Vector err = data.X(t).row(i).transpose() - icpt - ar - con;
        raw.intercept += icpt.squaredNorm();
        raw.autoregressive += ar.squaredNorm();
        raw.coupling += con.squaredNorm();
        raw.error += err.squaredNorm();
      }
      if (raw.total() > 0.0) {
        add_percentages(acc, raw);
        ++used_attr;
      }
    }
    if (used_attr > 0) scale(acc, 1.0 / used_attr);
    report.attributes = acc;
  }
  return report;
}

// --- forecast study -----------------------------------------------------------------------

ForecastMethod parse_forecast_method(const std::string& s) {
  if (s == "mle") return ForecastMethod::mle;
  if (s == "bayes") return ForecastMethod::bayes;
  throw ValidationError("unknown forecast method '" + s + "' (expected mle|bayes)");
}

std::string to_string(ForecastMethod m) { return m == ForecastMethod::mle ? "mle" : "bayes"; }

ModelMode submodel(const ModelMode& mode, int which) {
  ModelMode out = mode;
  out.contagion = which == 0 || which == 2;
  out.autoregression = which == 0 || which == 1;
  return out;
}

std::string submodel_name(int which) {
  static const char* names[] = {"full", "no_contagion", "no_autoregression", "neither"};
  return names[which];
}

namespace {

Dataset training_prefix(const Dataset& data, int time_points) {
  std::vector<Matrix> net(data.network.slices().begin(), data.network.slices().begin() + time_points);
  std::vector<Mask> masks;
  if (!data.network.fully_observed())
    masks.assign(data.network.masks().begin(), data.network.masks().begin() + time_points);
  Dataset out;
  out.network = NetworkSeries(std::move(net), data.network.directed(), std::move(masks));
  if (data.attributes.dims() > 0) {
    std::vector<Matrix> attr(data.attributes.slices().begin(), data.attributes.slices().begin() + time_points);
    out.attributes = AttributeSeries(std::move(attr));
  } else {
    out.attributes = AttributeSeries::empty(data.network.nodes(), time_points);
  }
  out.covariates = data.covariates;
  return out;
}

double score_squared(const Dataset& data, const Matrix& forecast, int t) {
  const int m = data.network.nodes();
  double sse = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = data.network.directed() ? 0 : i + 1; j < m; ++j) {
      if (i == j || !data.network.observed(t, i, j)) continue;
      const double r = data.network(t, i, j) - forecast(i, j);
      sse += r * r;
    }
  return sse;
}

double score_brier(const NetworkCoding& coding, const std::vector<Matrix>& probs, bool directed, int t) {
  const Eigen::MatrixXi& cls = coding.classes[t];
  const Eigen::Index m = cls.rows();
  double score = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = directed ? 0 : i + 1; j < m; ++j) {
      if (i == j || cls(i, j) < 0) continue;
      for (std::size_t c = 0; c < probs.size(); ++c) {
        const double d = probs[c](i, j) - (cls(i, j) == static_cast<int>(c) ? 1.0 : 0.0);
        score += d * d;
      }
    }
  return score;
}

}  // namespace

ForecastComparison forecast_study(const Dataset& data, const ModelMode& mode, const std::vector<int>& holdouts,
                                  const ForecastStudyOptions& options) {
  const int T = data.network.time_points();
  const bool ordinal = mode.network_scale == NetworkScale::ordinal;
  if (holdouts.empty()) throw ValidationError("forecast study needs at least one holdout time");
  for (int h : holdouts) {
    if (h < 2) throw ValidationError("holdout " + std::to_string(h) + " leaves fewer than two training time points");
    if (h >= T) throw ValidationError("holdout " + std::to_string(h) + " is beyond the last time point");
  }
  if (options.method == ForecastMethod::mle &&
      (ordinal || mode.attribute_scale != AttributeScale::gaussian))
    throw ValidationError("the MLE forecast study requires Gaussian network and attributes");
  if (mode.attribute_scale == AttributeScale::latent)
    throw ValidationError("the forecast study needs observed or ordinal attributes");

  std::optional<NetworkCoding> coding;
  SamplerConfig sampler = options.sampler;
  sampler.forecast = true;
  if (ordinal) {
    coding = NetworkCoding::build(data.network);
    sampler.network_levels = coding->levels;
    if (resolve_ordinal_mode(sampler.ordinal_mode, coding->levels.categories()) != OrdinalMode::threshold)
      throw ValidationError("Brier scoring of an ordinal network needs threshold mode");
  }
  if (mode.attribute_scale == AttributeScale::ordinal && sampler.attribute_levels.empty())
    sampler.attribute_levels = AttributeCoding::build(data.attributes).levels;

  const int H = static_cast<int>(holdouts.size());
  ForecastComparison out;
  out.holdouts = holdouts;
  out.score = ordinal ? "brier" : "squared_error";
  out.errors = Matrix::Zero(H, kSubmodels);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(H * kSubmodels));
#pragma omp parallel for schedule(dynamic)
  for (int task = 0; task < H * kSubmodels; ++task) {
    try {
      const int h = task / kSubmodels;
      const int which = task % kSubmodels;
      const int t = holdouts[h];
      const ModelMode sub = submodel(mode, which);
      const Dataset train = training_prefix(data, t);
      if (options.method == ForecastMethod::mle) {
        const MleFit fit = fit_mle(train.panel(), sub, options.solve, Execution::serial);
        const OneStepForecast f = forecast_one_step(fit.params, sub, data.covariates, data.network.slice(t - 1),
                                                    train.attributes.dims() > 0 ? train.attributes.slice(t - 1)
                                                                                : Matrix(Matrix::Zero(data.network.nodes(), 0)),
                                                    nullptr);
        out.errors(h, which) = score_squared(data, f.network, t);
      } else {
        const PosteriorSamples samples = run_chain(train, sub, options.prior, sampler);
        if (ordinal)
          out.errors(h, which) = score_brier(*coding, samples.forecast->network_probabilities, mode.directed, t);
        else
          out.errors(h, which) = score_squared(data, samples.forecast->network, t);
      }
    } catch (...) {
      errors[task] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.average = out.errors.colwise().mean().transpose();
  out.relative = Vector(kSubmodels);
  for (int k = 0; k < kSubmodels; ++k) out.relative(k) = 100.0 * (out.average(k) / out.average(0) - 1.0);
  return out;
}

std::string format_relative(double value, double baseline) {
  const double pct = 100.0 * (value / baseline - 1.0);
  char buf[64];
  if (pct >= 0.0)
    std::snprintf(buf, sizeof buf, "+%.1f%% worse", pct);
  else
    std::snprintf(buf, sizeof buf, "-%.1f%% better", -pct);
  return buf;
}

}  // namespace mcr
