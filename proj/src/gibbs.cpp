#include "mcr/gibbs.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "mcr/mle.hpp"

namespace mcr {

// --- configuration -------------------------------------------------------------------

namespace {

Matrix inverse_pd(const Matrix& M, const char* what) {
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw ValidationError(std::string(what) + " is not positive definite");
  return llt.solve(Matrix::Identity(M.rows(), M.cols()));
}

void require_pd(const Matrix& M, int expected, const char* what) {
  if (M.rows() != expected || M.cols() != expected)
    throw DimensionError(std::string(what) + " must be " + std::to_string(expected) + "x" + std::to_string(expected));
  if (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8) throw ValidationError(std::string(what) + " is not symmetric");
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw ValidationError(std::string(what) + " is not positive definite");
}

}  // namespace

Matrix PriorSpec::beta_covariance(int d) const {
  return V_beta ? *V_beta : Matrix(beta_variance * Matrix::Identity(d, d));
}

Matrix PriorSpec::b_covariance(int d) const { return V_b ? *V_b : Matrix(b_variance * Matrix::Identity(d, d)); }

Matrix PriorSpec::S0_or_default(int p) const { return S0 ? *S0 : Matrix(Matrix::Identity(p, p)); }

double PriorSpec::eta0_or_default(int p) const { return eta0 ? *eta0 : p + 2.0; }

void PriorSpec::validate(int d_beta, int d_b, int p) const {
  if (!(beta_variance > 0.0) || !(b_variance > 0.0)) throw ValidationError("prior variances must be positive");
  if (!(nu0 > 0.0) || !(sigma0_sq > 0.0)) throw ValidationError("nu0 and sigma0_sq must be positive");
  if (!(latent.variance > 0.0) || !(cut_variance > 0.0) || !(initial_coefficient_variance > 0.0))
    throw ValidationError("latent, cut and initial-state prior variances must be positive");
  if (V_beta) require_pd(*V_beta, d_beta, "V_beta");
  if (V_b) require_pd(*V_b, d_b, "V_b");
  if (p > 0) {
    if (S0) require_pd(*S0, p, "S0");
    if (!(eta0_or_default(p) > p - 1.0)) throw ValidationError("eta0 must exceed p - 1");
  }
}

void SamplerConfig::validate() const {
  if (iterations < 1) throw ValidationError("iterations must be positive");
  if (burn_in < 0) throw ValidationError("burn-in must be non-negative");
  if (iterations <= burn_in) throw ValidationError("iterations must exceed burn-in");
  if (thin < 1) throw ValidationError("thin must be at least 1");
  if (chains < 1) throw ValidationError("chains must be at least 1");
  if (latent_dim < 0) throw ValidationError("latent dimension must be non-negative");
  if (retained() < 1) throw ValidationError("no draws would be retained");
}

McrParams PosteriorSamples::posterior_mean() const {
  if (draws.empty()) throw ValidationError("posterior mean of an empty sample");
  McrParams mean = draws.front().params;
  const double n = static_cast<double>(draws.size());
  for (std::size_t k = 1; k < draws.size(); ++k) {
    const McrParams& d = draws[k].params;
    mean.gamma += d.gamma;
    mean.alpha1 += d.alpha1;
    if (mean.alpha2) *mean.alpha2 += *d.alpha2;
    mean.H += d.H;
    mean.Gamma += d.Gamma;
    mean.A += d.A;
    mean.C1 += d.C1;
    if (mean.C2) *mean.C2 += *d.C2;
    mean.sigma2 += d.sigma2;
    mean.Sigma += d.Sigma;
  }
  mean.gamma /= n;
  mean.alpha1 /= n;
  if (mean.alpha2) *mean.alpha2 /= n;
  mean.H /= n;
  mean.Gamma /= n;
  mean.A /= n;
  mean.C1 /= n;
  if (mean.C2) *mean.C2 /= n;
  mean.sigma2 /= n;
  mean.Sigma /= n;
  return mean;
}

// --- blocks ------------------------------------------------------------------------------

InformationForm beta_conditional(const NormalEquations& ne, double sigma2, const Matrix& V_beta_inverse) {
  if (ne.responses() != 1) throw DimensionError("beta step needs single-response normal equations");
  if (V_beta_inverse.rows() != ne.regressors()) throw DimensionError("V_beta does not match the design length");
  return {V_beta_inverse + ne.Q / sigma2, ne.l() / sigma2};
}

Vector step_beta(const NormalEquations& ne, double sigma2, const Matrix& V_beta_inverse, Rng& rng) {
  const InformationForm info = beta_conditional(ne, sigma2, V_beta_inverse);
  return gaussian_from_precision(rng, info.precision, info.linear);
}

InformationForm b_conditional(const NormalEquations& ne, const Matrix& Sigma_inverse, const Matrix& V_b_inverse) {
  const int p = ne.responses();
  const int d = ne.regressors();
  if (Sigma_inverse.rows() != p) throw DimensionError("Sigma does not match the attribute dimension");
  if (V_b_inverse.rows() != p * d) throw DimensionError("V_b does not match vec(B)");
  InformationForm info{V_b_inverse, Vector(p * d)};
  for (int c1 = 0; c1 < d; ++c1)
    for (int c2 = 0; c2 < d; ++c2) info.precision.block(c1 * p, c2 * p, p, p) += ne.Q(c1, c2) * Sigma_inverse;
  const Matrix SL = Sigma_inverse * ne.L;
  info.linear = Eigen::Map<const Vector>(SL.data(), p * d);
  return info;
}

Matrix step_b(const NormalEquations& ne, const Matrix& Sigma_inverse, const Matrix& V_b_inverse, Rng& rng) {
  const InformationForm info = b_conditional(ne, Sigma_inverse, V_b_inverse);
  const Vector draw = gaussian_from_precision(rng, info.precision, info.linear);
  return Eigen::Map<const Matrix>(draw.data(), ne.responses(), ne.regressors());
}

double step_sigma2(double rss, long count, const PriorSpec& prior, Rng& rng) {
  const double shape = 0.5 * (prior.nu0 + static_cast<double>(count));
  const double rate = 0.5 * (prior.nu0 * prior.sigma0_sq + std::max(0.0, rss));
  return 1.0 / rng.gamma(shape, rate);
}

Matrix step_Sigma(const Matrix& rss, long count, const PriorSpec& prior, Rng& rng) {
  const int p = static_cast<int>(rss.rows());
  const Matrix scale_inv = prior.S0_or_default(p) + 0.5 * (rss + rss.transpose());
  Eigen::LLT<Matrix> llt(scale_inv);
  if (llt.info() != Eigen::Success) throw NumericalError("S0 + RSS is not positive definite");
  const Matrix scale = llt.solve(Matrix::Identity(p, p));
  const Matrix precision = wishart(rng, scale, prior.eta0_or_default(p) + static_cast<double>(count));
  Matrix Sigma = inverse_pd(precision, "sampled precision");
  return 0.5 * (Sigma + Sigma.transpose());
}

// --- names ------------------------------------------------------------------------------

namespace {

template <typename Fn>
void visit_scalars(const McrParams& params, const ModelMode& mode, Fn&& fn) {
  const int p = params.dims();
  auto idx = [](int r, int c) { return "[" + std::to_string(r) + "," + std::to_string(c) + "]"; };
  for (Eigen::Index k = 0; k < params.gamma.size(); ++k) fn("gamma[" + std::to_string(k) + "]", params.gamma(k));
  if (mode.autoregression) {
    fn("alpha1", params.alpha1);
    if (mode.directed) fn("alpha2", params.alpha2.value_or(0.0));
  }
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r) {
      if (mode.diagonal_homophily() && r != c) continue;
      if (!mode.directed && r < c) continue;
      fn("H" + idx(r, c), params.H(r, c));
    }
  for (Eigen::Index c = 0; c < params.Gamma.cols(); ++c)
    for (int r = 0; r < p; ++r) fn("Gamma" + idx(r, static_cast<int>(c)), params.Gamma(r, c));
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r) fn("A" + idx(r, c), params.A(r, c));
  if (mode.contagion) {
    for (int c = 0; c < p; ++c)
      for (int r = 0; r < p; ++r) fn("C1" + idx(r, c), params.C1(r, c));
    if (mode.directed)
      for (int c = 0; c < p; ++c)
        for (int r = 0; r < p; ++r) fn("C2" + idx(r, c), (*params.C2)(r, c));
  }
  if (!mode.unit_network_variance()) fn("sigma2", params.sigma2);
  if (!mode.unit_attribute_covariance())
    for (int c = 0; c < p; ++c)
      for (int r = c; r < p; ++r) fn("Sigma" + idx(r, c), params.Sigma(r, c));
}

}  // namespace

std::vector<std::string> scalar_parameter_names(const McrParams& params, const ModelMode& mode) {
  std::vector<std::string> names;
  visit_scalars(params, mode, [&](const std::string& name, double) { names.push_back(name); });
  return names;
}

Vector scalar_parameters(const McrParams& params, const ModelMode& mode) {
  std::vector<double> values;
  visit_scalars(params, mode, [&](const std::string&, double v) { values.push_back(v); });
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// --- chain ------------------------------------------------------------------------------

namespace {

InitialStateParams transform_initial(const InitialStateParams& init, const Alignment& a) {
  InitialStateParams out = init;
  for (std::size_t k = 0; k < a.perm.size(); ++k) {
    out.G0.row(static_cast<Eigen::Index>(k)) = a.signs[k] * init.G0.row(a.perm[k]);
    out.tau2(static_cast<Eigen::Index>(k)) = init.tau2(a.perm[k]);
  }
  return out;
}

void align_draw(Draw& draw, const Alignment& a) {
  draw.params = transform_attribute_basis(draw.params, a.perm, a.signs);
  if (draw.initial) draw.initial = transform_initial(*draw.initial, a);
  if (!draw.latent.empty()) draw.latent = apply_alignment(draw.latent, a);
}

Matrix align_columns(const Matrix& M, const Alignment& a) {
  Matrix out(M.rows(), M.cols());
  for (Eigen::Index k = 0; k < M.cols(); ++k) out.col(k) = a.signs[k] * M.col(a.perm[k]);
  return out;
}

struct ChainResult {
  std::vector<Draw> draws;
  std::vector<Matrix> attribute_mean;
  std::optional<OneStepForecast> forecast;
};

class Chain {
 public:
  Chain(const Dataset& data, const ModelMode& mode, const PriorSpec& prior, const SamplerConfig& config, int id)
      : data_(data), mode_(mode), prior_(prior), config_(config), id_(id), rng_(config.seed, id),
        cov_(data.covariates) {}

  ChainResult run() {
    initialize();
    ChainResult result;
    const bool track_attributes = mode_.attribute_scale != AttributeScale::gaussian && p_ > 0;
    long kept = 0;
    std::vector<Matrix> reference;
    for (int it = 1; it <= config_.iterations; ++it) {
      try {
        iterate();
      } catch (const NumericalError& e) {
        throw NumericalError("chain " + std::to_string(id_) + ", iteration " + std::to_string(it) + ": " + e.what());
      }
      if (it <= config_.burn_in || (it - config_.burn_in) % config_.thin != 0) continue;

      Draw draw;
      draw.chain = id_;
      draw.iteration = it;
      draw.params = params_;
      draw.initial = init_;
      if (net_ord_ && net_ord_->mode == OrdinalMode::threshold) draw.network_cuts = net_ord_->cuts.cuts;
      if (attr_ord_)
        for (std::size_t k = 0; k < attr_ord_->cuts.size(); ++k)
          draw.attribute_cuts.push_back(attr_ord_->modes[k] == OrdinalMode::threshold ? attr_ord_->cuts[k].cuts
                                                                                    : std::vector<double>{});
      std::vector<Matrix> trajectory = X_;
      if (mode_.attribute_scale == AttributeScale::latent) {
        if (reference.empty()) reference = X_;
        const Alignment a = best_alignment(reference, X_);
        align_draw(draw, a);
        trajectory = apply_alignment(X_, a);
      }
      if (track_attributes) {
        if (result.attribute_mean.empty())
          result.attribute_mean.assign(trajectory.size(), Matrix::Zero(data_.network.nodes(), p_));
        for (std::size_t t = 0; t < trajectory.size(); ++t) result.attribute_mean[t] += trajectory[t];
        if (config_.store_latent_draws) draw.latent = trajectory;
      }
      if (config_.forecast) {
        const Thresholds* cuts = net_ord_ && net_ord_->mode == OrdinalMode::threshold ? &net_ord_->cuts : nullptr;
        OneStepForecast f = forecast_one_step(draw.params, mode_, cov_, Z_.back(), trajectory.back(), cuts);
        if (!result.forecast) {
          result.forecast = std::move(f);
        } else {
          result.forecast->network += f.network;
          result.forecast->attributes += f.attributes;
          for (std::size_t c = 0; c < f.network_probabilities.size(); ++c)
            result.forecast->network_probabilities[c] += f.network_probabilities[c];
        }
      }
      result.draws.push_back(std::move(draw));
      ++kept;
    }
    const double inv = 1.0 / static_cast<double>(kept);
    for (Matrix& M : result.attribute_mean) M *= inv;
    if (result.forecast) {
      result.forecast->network *= inv;
      result.forecast->attributes *= inv;
      for (Matrix& P : result.forecast->network_probabilities) P *= inv;
    }
    return result;
  }

 private:
  void initialize() {
    const int m = data_.network.nodes();
    const int T = data_.network.time_points();
    latent_ = mode_.attribute_scale == AttributeScale::latent;
    p_ = latent_ ? config_.latent_dim : data_.attributes.dims();

    if (mode_.network_scale == NetworkScale::ordinal) {
      net_ord_ = make_network_latent_state(data_.network, config_.ordinal_mode, Z_, rng_, config_.network_levels);
    } else {
      Z_ = data_.network.slices();
    }
    if (latent_) {
      X_ = initialize_latent(Z_, p_, rng_);
    } else if (mode_.attribute_scale == AttributeScale::ordinal) {
      attr_ord_ = make_attribute_latent_state(data_.attributes, config_.ordinal_mode, X_, rng_,
                                              config_.attribute_levels);
      attr_ord_->cut_mean = prior_.cut_mean;
      attr_ord_->cut_variance = prior_.cut_variance;
    } else if (p_ > 0) {
      X_ = data_.attributes.slices();
    } else {
      X_.assign(static_cast<std::size_t>(T), Matrix::Zero(m, 0));
    }

    const int d_beta = network_row_length(cov_.dyad_dim(), p_, mode_);
    const int d_b = p_ > 0 ? attribute_row_length(cov_.node_dim(), p_, mode_) : 0;
    prior_.validate(d_beta, d_b * p_, p_);
    V_beta_inv_ = inverse_pd(prior_.beta_covariance(d_beta), "V_beta");
    if (p_ > 0) V_b_inv_ = inverse_pd(prior_.b_covariance(d_b * p_), "V_b");

    impute_network_ = net_ord_.has_value() || !data_.network.fully_observed();
    static_network_ = !impute_network_ && mode_.attribute_scale == AttributeScale::gaussian;
    static_attributes_ = !impute_network_ && mode_.attribute_scale == AttributeScale::gaussian;

    z_prior_ = prior_.latent;
    if (!net_ord_) z_prior_.initial_only = true;

    if (latent_ || attr_ord_) {
      anchor_ = prior_.flat_initial_latent && latent_ ? AttributeAnchor::flat() : AttributeAnchor::standard_normal(m, p_);
      if (attr_ord_ && prior_.attribute_entry_prior) anchor_.every_entry = prior_.latent;
    }
    if (config_.initial_state_regression) {
      init_ = InitialStateParams{Vector::Zero(cov_.dyad_dim()), Matrix::Zero(p_, cov_.node_dim()), Vector::Ones(p_)};
      if ((latent_ || attr_ord_) && p_ > 0) {
        anchor_.initial = true;
        anchor_.initial_mean = Matrix::Zero(m, p_);
        anchor_.initial_variance = Vector::Ones(p_);
      }
    }

    params_ = McrParams::zeros(mode_, cov_.dyad_dim(), cov_.node_dim(), p_);
    if (config_.init == ChainInit::mle)
      initialize_from_mle();
    else
      initialize_from_prior();
    if (mode_.unit_network_variance()) params_.sigma2 = 1.0;
    if (!(params_.sigma2 > 1e-8) || !std::isfinite(params_.sigma2)) params_.sigma2 = 1.0;
    if (p_ > 0) {
      if (mode_.unit_attribute_covariance()) {
        params_.Sigma = Matrix::Identity(p_, p_);
      } else {
        Eigen::LLT<Matrix> llt(params_.Sigma);
        if (llt.info() != Eigen::Success || !params_.Sigma.allFinite()) params_.Sigma = Matrix::Identity(p_, p_);
      }
    }

    if (static_network_) ne_network_ = accumulate_network_normal_equations(working(), mode_);
    if (static_attributes_ && p_ > 0) ne_attributes_ = accumulate_attribute_normal_equations(working(), mode_);
  }

  Panel working() const { return Panel(Z_, X_, cov_, mode_.directed); }

  void initialize_from_mle() {
    const SolveOptions options{1e12, true};
    double cond = 0.0;
    try {
      const NormalEquations ne = accumulate_network_normal_equations(working(), mode_);
      const Vector beta = guarded_solve(ne.Q, ne.l(), options, {}, cond);
      if (beta.allFinite()) {
        unpack_beta(beta, mode_, params_);
        params_.sigma2 = ne.residual_cross_product(beta.transpose())(0, 0) / static_cast<double>(ne.count);
      }
    } catch (const Error&) {
    }
    if (p_ == 0) return;
    try {
      const NormalEquations ne = accumulate_attribute_normal_equations(working(), mode_);
      const Matrix B = guarded_solve(ne.Q, ne.L.transpose(), options, {}, cond).transpose();
      if (B.allFinite()) {
        unpack_B(B, mode_, params_);
        params_.Sigma = ne.residual_cross_product(B) / static_cast<double>(ne.count);
      }
    } catch (const Error&) {
    }
  }

  void initialize_from_prior() {
    const int d_beta = static_cast<int>(V_beta_inv_.rows());
    unpack_beta(gaussian_from_precision(rng_, V_beta_inv_, Vector::Zero(d_beta)), mode_, params_);
    params_.sigma2 = 1.0 / rng_.gamma(0.5 * prior_.nu0, 0.5 * prior_.nu0 * prior_.sigma0_sq);
    if (p_ == 0) return;
    const int D = static_cast<int>(V_b_inv_.rows());
    const Vector b = gaussian_from_precision(rng_, V_b_inv_, Vector::Zero(D));
    unpack_B(Eigen::Map<const Matrix>(b.data(), p_, D / p_), mode_, params_);
    const Matrix S0_inv = inverse_pd(prior_.S0_or_default(p_), "S0");
    params_.Sigma = inverse_pd(wishart(rng_, S0_inv, prior_.eta0_or_default(p_)), "prior Sigma draw");
  }

  void iterate() {
    const NormalEquations ne_net =
        static_network_ ? *ne_network_ : accumulate_network_normal_equations(working(), mode_);
    const Vector beta = step_beta(ne_net, params_.sigma2, V_beta_inv_, rng_);
    unpack_beta(beta, mode_, params_);

    std::optional<NormalEquations> ne_att;
    if (p_ > 0) {
      ne_att = static_attributes_ ? *ne_attributes_ : accumulate_attribute_normal_equations(working(), mode_);
      const Matrix Sigma_inv = mode_.unit_attribute_covariance() ? Matrix(Matrix::Identity(p_, p_))
                                                                 : inverse_pd(params_.Sigma, "Sigma");
      unpack_B(step_b(*ne_att, Sigma_inv, V_b_inv_, rng_), mode_, params_);
    }

    if (!mode_.unit_network_variance()) {
      const double rss = ne_net.residual_cross_product(beta.transpose())(0, 0);
      params_.sigma2 = step_sigma2(rss, ne_net.count, prior_, rng_);
    }

    if (p_ > 0 && mode_.attribute_scale == AttributeScale::gaussian) {
      params_.Sigma = step_Sigma(ne_att->residual_cross_product(pack_B(params_, mode_)), ne_att->count, prior_, rng_);
    } else if (latent_) {
      step_latent_sweep(X_, Z_, cov_, params_, mode_, anchor_, rng_);
    }

    if (impute_network_) {
      const Vector* gamma0 = init_ ? &init_->gamma0 : nullptr;
      step_z_sweep(Z_, X_, cov_, params_, mode_, z_prior_, gamma0, net_ord_ ? &*net_ord_ : nullptr, data_.network,
                   rng_);
      if (net_ord_ && net_ord_->mode == OrdinalMode::threshold)
        step_thresholds(net_ord_->cuts, category_extrema(Z_, net_ord_->coding), prior_.cut_mean, prior_.cut_variance,
                        rng_);
    }

    if (attr_ord_) step_w_sweep(X_, Z_, cov_, params_, mode_, anchor_, *attr_ord_, rng_);

    if (init_) update_initial_state();
  }

  void update_initial_state() {
    const int m = data_.network.nodes();
    const double v0_inv = 1.0 / prior_.initial_coefficient_variance;
    if (impute_network_) {
      const double inv_s2 = 1.0 / params_.sigma2;
      if (cov_.saturated_dyads()) {
        for (int i = 0; i < m; ++i)
          for (int j = mode_.directed ? 0 : i + 1; j < m; ++j) {
            if (i == j) continue;
            const double prec = v0_inv + inv_s2;
            init_->gamma0(cov_.dyad_index(i, j)) = Z_[0](i, j) * inv_s2 / prec + rng_.normal() / std::sqrt(prec);
          }
      } else {
        const int q = cov_.dyad_dim();
        Matrix P = v0_inv * Matrix::Identity(q, q);
        Vector l = Vector::Zero(q);
        for (int i = 0; i < m; ++i)
          for (int j = mode_.directed ? 0 : i + 1; j < m; ++j) {
            if (i == j) continue;
            const Vector s = cov_.dyad(i, j);
            P.noalias() += inv_s2 * s * s.transpose();
            l += (inv_s2 * Z_[0](i, j)) * s;
          }
        init_->gamma0 = gaussian_from_precision(rng_, P, l);
      }
    }
    if ((latent_ || attr_ord_) && p_ > 0) {
      const Matrix& S = cov_.node_matrix();
      const int q = static_cast<int>(S.cols());
      const Matrix StS = S.transpose() * S;
      for (int k = 0; k < p_; ++k) {
        const Vector w = X_[0].col(k);
        const double inv_t = 1.0 / init_->tau2(k);
        const Matrix P = v0_inv * Matrix::Identity(q, q) + inv_t * StS;
        init_->G0.row(k) = gaussian_from_precision(rng_, P, inv_t * (S.transpose() * w)).transpose();
        const double rss = (w - S * init_->G0.row(k).transpose()).squaredNorm();
        init_->tau2(k) = 1.0 / rng_.gamma(0.5 * (prior_.nu0 + m), 0.5 * (prior_.nu0 * prior_.sigma0_sq + rss));
      }
      anchor_.initial_mean = S * init_->G0.transpose();
      anchor_.initial_variance = init_->tau2;
    }
  }

  const Dataset& data_;
  ModelMode mode_;
  PriorSpec prior_;
  SamplerConfig config_;
  int id_;
  Rng rng_;
  const CovariateSpec& cov_;

  int p_ = 0;
  bool latent_ = false;
  bool impute_network_ = false;
  bool static_network_ = false;
  bool static_attributes_ = false;
  McrParams params_;
  std::vector<Matrix> Z_;
  std::vector<Matrix> X_;
  std::optional<NetworkLatentState> net_ord_;
  std::optional<AttributeLatentState> attr_ord_;
  std::optional<InitialStateParams> init_;
  AttributeAnchor anchor_;
  LatentEntryPrior z_prior_;
  Matrix V_beta_inv_;
  Matrix V_b_inv_;
  std::optional<NormalEquations> ne_network_;
  std::optional<NormalEquations> ne_attributes_;
};

void check_inputs(const Dataset& data, const ModelMode& mode, const SamplerConfig& config) {
  config.validate();
  if (data.network.directed() != mode.directed) throw ValidationError("mode direction disagrees with the network");
  if (data.network.time_points() < 2) throw ValidationError("the sampler needs at least two time points");
  if (mode.attribute_scale == AttributeScale::latent) {
    if (config.latent_dim < 1) throw ValidationError("latent attributes need a latent dimension >= 1");
    if (data.attributes.dims() > 0) throw ValidationError("latent attributes cannot be combined with observed attributes");
  } else if (config.latent_dim > 0) {
    throw ValidationError("a latent dimension requires the latent attribute scale");
  }
  if (mode.attribute_scale == AttributeScale::ordinal && data.attributes.dims() == 0)
    throw ValidationError("ordinal attributes need an attribute series");
  if (data.attributes.dims() > 0 && data.attributes.time_points() != data.network.time_points())
    throw DimensionError("network and attributes have different numbers of time points");
}

}  // namespace

PosteriorSamples run_chain(const Dataset& data, const ModelMode& mode, const PriorSpec& prior,
                           const SamplerConfig& config) {
  check_inputs(data, mode, config);
  std::vector<ChainResult> results(static_cast<std::size_t>(config.chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.chains));
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < config.chains; ++c) {
    try {
      Chain chain(data, mode, prior, config, c);
      results[c] = chain.run();
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorSamples samples;
  samples.mode = mode;
  samples.iterations = config.iterations;
  samples.burn_in = config.burn_in;
  samples.thin = config.thin;
  samples.seed = config.seed;
  samples.chains = config.chains;

  if (mode.attribute_scale == AttributeScale::latent) {
    for (int c = 1; c < config.chains; ++c) {
      const Alignment a = best_alignment(results[0].attribute_mean, results[c].attribute_mean);
      for (Draw& d : results[c].draws) align_draw(d, a);
      results[c].attribute_mean = apply_alignment(results[c].attribute_mean, a);
      if (results[c].forecast) results[c].forecast->attributes = align_columns(results[c].forecast->attributes, a);
    }
  }
  const double w = 1.0 / config.chains;
  for (int c = 0; c < config.chains; ++c) {
    ChainResult& r = results[c];
    for (Draw& d : r.draws) samples.draws.push_back(std::move(d));
    if (!r.attribute_mean.empty()) {
      if (samples.attribute_mean.empty())
        samples.attribute_mean.assign(r.attribute_mean.size(), Matrix::Zero(r.attribute_mean[0].rows(),
                                                                            r.attribute_mean[0].cols()));
      for (std::size_t t = 0; t < r.attribute_mean.size(); ++t) samples.attribute_mean[t] += w * r.attribute_mean[t];
    }
    if (r.forecast) {
      if (!samples.forecast) {
        samples.forecast = OneStepForecast{w * r.forecast->network, w * r.forecast->attributes, {}};
        for (const Matrix& P : r.forecast->network_probabilities) samples.forecast->network_probabilities.push_back(w * P);
      } else {
        samples.forecast->network += w * r.forecast->network;
        samples.forecast->attributes += w * r.forecast->attributes;
        for (std::size_t k = 0; k < r.forecast->network_probabilities.size(); ++k)
          samples.forecast->network_probabilities[k] += w * r.forecast->network_probabilities[k];
      }
    }
  }
  return samples;
}

PosteriorSamples fit_ordinal(const Dataset& data, const ModelMode& mode, const PriorSpec& prior,
                             const SamplerConfig& config) {
  return run_chain(data, mode, prior, config);
}

void align_latent_draws(PosteriorSamples& samples) {
  if (samples.draws.empty() || samples.draws.front().latent.empty()) return;
  const std::vector<Matrix> reference = samples.draws.front().latent;
  for (Draw& d : samples.draws) {
    if (d.latent.empty()) continue;
    align_draw(d, best_alignment(reference, d.latent));
  }
}

}  // namespace mcr
