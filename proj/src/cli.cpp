#include "mcr/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "mcr/io.hpp"
#include "mcr/simulate.hpp"

namespace mcr {

namespace {

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::fit_mle: return "fit-mle";
    case Subcommand::fit_bayes: return "fit-bayes";
    case Subcommand::diagnose: return "diagnose";
    case Subcommand::forecast_study: return "forecast-study";
  }
  return "?";
}

struct RawFlags {
  std::string network_scale = "gaussian";
  std::string attribute_scale = "gaussian";
  std::string ordinal_mode = "auto";
  std::string init = "mle";
  std::string method = "mle";
  std::uint64_t seed = 1;
};

void add_data_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--network", c.network_path, "network CSV (t,i,j,y)")->required();
  sub->add_option("--attributes", c.attributes_path, "attribute CSV (t,i,k,x)");
  sub->add_option("--dyad-covariates", c.dyad_covariates_path, "dyad covariate CSV (i,j,s1..)");
  sub->add_option("--node-covariates", c.node_covariates_path, "node covariate CSV (i,s1..)");
  sub->add_flag("--directed", c.mode.directed, "treat the network as directed");
  sub->add_flag("--dense-zero", c.dense_zero, "unlisted pairs are 0 instead of missing");
}

void add_scale_options(CLI::App* sub, RawFlags& raw, RunConfig& c) {
  sub->add_option("--network-scale", raw.network_scale, "gaussian|ordinal");
  sub->add_option("--attribute-scale", raw.attribute_scale, "gaussian|ordinal|latent");
  sub->add_option("--latent-dim", c.latent_dim, "dimension of latent attributes");
}

void add_solver_options(CLI::App* sub, RunConfig& c) {
  sub->add_flag("--pinv", c.solve.pseudo_inverse_fallback, "pseudo-inverse fallback for ill-conditioned fits");
  sub->add_option("--condition-cap", c.solve.condition_cap, "largest acceptable condition number");
}

void add_sampler_options(CLI::App* sub, RawFlags& raw, RunConfig& c) {
  sub->add_option("--iters", c.sampler.iterations, "total iterations per chain");
  sub->add_option("--burn-in", c.sampler.burn_in, "discarded iterations");
  sub->add_option("--thin", c.sampler.thin, "keep every k-th iteration");
  sub->add_option("--chains", c.sampler.chains, "independent chains");
  sub->add_option("--prior", c.prior_path, "prior JSON");
  sub->add_option("--ordinal-mode", raw.ordinal_mode, "auto|rank|threshold");
  sub->add_option("--init", raw.init, "mle|prior");
  sub->add_flag("--initial-state-regression", c.sampler.initial_state_regression,
                "regress latent slice 0 on covariates");
  sub->add_option("--network-levels", c.network_levels, "ordered network categories")->delimiter(',');
  sub->add_option("--attribute-levels", c.attribute_levels, "ordered attribute categories")->delimiter(',');
}

void require_file(const std::string& path, const char* flag, std::vector<std::string>& v) {
  if (!path.empty() && !std::filesystem::is_regular_file(path)) v.push_back(std::string(flag) + ": no such file '" + path + "'");
}

template <class Parse>
void parse_enum(const std::string& text, const char* flag, Parse parse, std::vector<std::string>& v) {
  try {
    parse(text);
  } catch (const Error&) {
    v.push_back(std::string(flag) + ": unknown value '" + text + "'");
  }
}

}  // namespace

RunConfig parse_and_validate(int argc, const char* const* argv) {
  RunConfig c;
  RawFlags raw;
  int threads = 0;

  CLI::App app{"Multiplicative coevolution regression for network and attribute panels"};
  app.require_subcommand(1);
  app.add_option("--threads", threads, "OpenMP threads (default: MCR_THREADS or all cores)");

  auto* sim = app.add_subcommand("simulate", "simulate a panel from given or default parameters");
  sim->add_option("--m", c.m, "nodes")->required();
  sim->add_option("--n", c.n, "transitions (n + 1 time points)")->required();
  sim->add_option("--p", c.p, "attribute dimension");
  sim->add_option("--params", c.params_path, "parameter JSON (default: built-in moderate values)");
  sim->add_option("--dyad-covariates", c.dyad_covariates_path, "dyad covariate CSV");
  sim->add_option("--node-covariates", c.node_covariates_path, "node covariate CSV");
  sim->add_flag("--directed", c.mode.directed, "directed network");
  sim->add_option("--burn-in", c.burn_in_steps, "discarded steps before slice 0");
  sim->add_option("--out-prefix", c.out_prefix, "output prefix");
  sim->add_option("--network-cuts", c.network_cuts, "interior cuts of an ordinal network")->delimiter(',');
  sim->add_option("--attribute-cuts", c.attribute_cuts, "interior cuts of ordinal attributes")->delimiter(',');
  sim->add_option("--network-scale", raw.network_scale, "gaussian|ordinal");
  sim->add_option("--attribute-scale", raw.attribute_scale, "gaussian|ordinal|latent");

  auto* mle = app.add_subcommand("fit-mle", "conditional maximum likelihood fit");
  add_data_options(mle, c);
  add_scale_options(mle, raw, c);
  add_solver_options(mle, c);
  mle->add_option("--out", c.out_path, "report JSON")->required();

  auto* bayes = app.add_subcommand("fit-bayes", "Gibbs sampler");
  add_data_options(bayes, c);
  add_scale_options(bayes, raw, c);
  add_sampler_options(bayes, raw, c);
  bayes->add_option("--export-latent", c.export_latent_path, "posterior-mean latent attributes CSV");
  bayes->add_option("--out", c.out_path, "samples NDJSON")->required();

  auto* diag = app.add_subcommand("diagnose", "posterior summaries and sum-of-squares decomposition");
  diag->add_option("--samples", c.samples_path, "samples NDJSON");
  diag->add_option("--params", c.params_path, "parameter or MLE report JSON");
  diag->add_option("--network", c.network_path, "network CSV (enables the decomposition)");
  diag->add_option("--attributes", c.attributes_path, "attribute CSV");
  diag->add_option("--dyad-covariates", c.dyad_covariates_path, "dyad covariate CSV");
  diag->add_option("--node-covariates", c.node_covariates_path, "node covariate CSV");
  diag->add_flag("--directed", c.mode.directed, "directed network");
  diag->add_flag("--dense-zero", c.dense_zero, "unlisted pairs are 0 instead of missing");
  diag->add_option("--probs", c.probs, "quantile levels")->delimiter(',');
  diag->add_option("--out", c.out_path, "report JSON")->required();

  auto* fc = app.add_subcommand("forecast-study", "one-step forecasts of nested submodels");
  add_data_options(fc, c);
  add_scale_options(fc, raw, c);
  add_solver_options(fc, c);
  add_sampler_options(fc, raw, c);
  fc->add_option("--holdouts", c.holdouts, "held-out time points (default: 2..T-1)")->delimiter(',');
  fc->add_option("--method", raw.method, "mle|bayes");
  fc->add_option("--out", c.out_path, "report JSON")->required();

  for (auto* sub : {sim, bayes, fc}) sub->add_option("--seed", raw.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    throw;
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  if (sim->parsed()) c.subcommand = Subcommand::simulate;
  if (mle->parsed()) c.subcommand = Subcommand::fit_mle;
  if (bayes->parsed()) c.subcommand = Subcommand::fit_bayes;
  if (diag->parsed()) c.subcommand = Subcommand::diagnose;
  if (fc->parsed()) c.subcommand = Subcommand::forecast_study;

  std::vector<std::string> v;
  if (app.count("--threads")) {
    if (threads < 1) v.push_back("--threads must be at least 1");
    c.threads = threads;
  } else if (const char* env = std::getenv("MCR_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || t < 1) v.push_back("MCR_THREADS must be a positive integer");
    else c.threads = static_cast<int>(t);
  }

  parse_enum(raw.network_scale, "--network-scale", [&](const std::string& s) { c.mode.network_scale = parse_network_scale(s); }, v);
  parse_enum(raw.attribute_scale, "--attribute-scale",
             [&](const std::string& s) { c.mode.attribute_scale = parse_attribute_scale(s); }, v);
  parse_enum(raw.ordinal_mode, "--ordinal-mode", [&](const std::string& s) { c.sampler.ordinal_mode = parse_ordinal_mode(s); }, v);
  parse_enum(raw.method, "--method", [&](const std::string& s) { c.method = parse_forecast_method(s); }, v);
  if (raw.init == "mle") c.sampler.init = ChainInit::mle;
  else if (raw.init == "prior") c.sampler.init = ChainInit::prior_draw;
  else v.push_back("--init: unknown value '" + raw.init + "'");
  c.seed = raw.seed;
  c.sampler.seed = raw.seed;

  const bool latent = c.mode.attribute_scale == AttributeScale::latent;
  const bool has_attributes = !c.attributes_path.empty();
  const Subcommand s = c.subcommand;

  if (s == Subcommand::simulate) {
    if (c.m < 2) v.push_back("--m must be at least 2");
    if (c.n < 1) v.push_back("--n must be at least 1");
    if (c.p < 0) v.push_back("--p must be non-negative");
    if (c.burn_in_steps < 0) v.push_back("--burn-in must be non-negative");
    if (c.mode.attribute_scale != AttributeScale::gaussian && c.p < 1)
      v.push_back("--attribute-scale " + raw.attribute_scale + " needs --p >= 1");
    if (!c.network_cuts.empty() && c.mode.network_scale != NetworkScale::ordinal)
      v.push_back("--network-cuts requires --network-scale ordinal");
    if (!c.attribute_cuts.empty() && c.mode.attribute_scale != AttributeScale::ordinal)
      v.push_back("--attribute-cuts requires --attribute-scale ordinal");
    for (std::size_t k = 1; k < c.network_cuts.size(); ++k)
      if (!(c.network_cuts[k - 1] < c.network_cuts[k])) v.push_back("--network-cuts must be strictly increasing");
    for (std::size_t k = 1; k < c.attribute_cuts.size(); ++k)
      if (!(c.attribute_cuts[k - 1] < c.attribute_cuts[k])) v.push_back("--attribute-cuts must be strictly increasing");
  }

  if (s == Subcommand::fit_mle || s == Subcommand::fit_bayes || s == Subcommand::forecast_study) {
    if (c.latent_dim < 0) v.push_back("--latent-dim must be non-negative");
    if (c.latent_dim > 0 && has_attributes)
      v.push_back("--latent-dim and --attributes are mutually exclusive (latent attributes are unobserved)");
    if (c.latent_dim > 0 && !latent) {
      if (raw.attribute_scale == "gaussian") c.mode.attribute_scale = AttributeScale::latent;
      else v.push_back("--latent-dim requires --attribute-scale latent");
    }
    if (latent && c.latent_dim < 1) v.push_back("--attribute-scale latent requires --latent-dim >= 1");
    if (c.mode.attribute_scale == AttributeScale::ordinal && !has_attributes)
      v.push_back("--attribute-scale ordinal requires --attributes");
    if (!c.network_levels.empty() && c.mode.network_scale != NetworkScale::ordinal)
      v.push_back("--network-levels requires --network-scale ordinal");
    if (!c.attribute_levels.empty() && c.mode.attribute_scale != AttributeScale::ordinal)
      v.push_back("--attribute-levels requires --attribute-scale ordinal");
    if (!(c.solve.condition_cap > 1.0)) v.push_back("--condition-cap must exceed 1");
  }
  c.sampler.latent_dim = c.mode.attribute_scale == AttributeScale::latent ? c.latent_dim : 0;

  if (s == Subcommand::fit_mle) {
    if (c.mode.network_scale != NetworkScale::gaussian || c.mode.attribute_scale != AttributeScale::gaussian)
      v.push_back("fit-mle requires Gaussian network and attribute scales; use fit-bayes for ordinal or latent data");
  }

  if (s == Subcommand::fit_bayes || (s == Subcommand::forecast_study && c.method == ForecastMethod::bayes)) {
    const auto& sc = c.sampler;
    if (sc.iterations < 1) v.push_back("--iters must be positive");
    if (sc.burn_in < 0) v.push_back("--burn-in must be non-negative");
    if (sc.iterations <= sc.burn_in) v.push_back("--iters must exceed --burn-in");
    if (sc.thin < 1) v.push_back("--thin must be at least 1");
    if (sc.chains < 1) v.push_back("--chains must be at least 1");
  }
  if (s == Subcommand::fit_bayes && !c.export_latent_path.empty() &&
      c.mode.attribute_scale == AttributeScale::gaussian)
    v.push_back("--export-latent requires latent or ordinal attributes");

  if (s == Subcommand::forecast_study) {
    if (latent) v.push_back("forecast-study does not support latent attributes");
    if (c.method == ForecastMethod::mle &&
        (c.mode.network_scale != NetworkScale::gaussian || c.mode.attribute_scale != AttributeScale::gaussian))
      v.push_back("--method mle requires Gaussian scales");
    for (int h : c.holdouts)
      if (h < 2) v.push_back("--holdouts entries must be at least 2");
  }

  if (s == Subcommand::diagnose) {
    if (c.samples_path.empty() == c.params_path.empty()) v.push_back("diagnose needs exactly one of --samples or --params");
    if (!c.params_path.empty() && c.network_path.empty()) v.push_back("--params requires --network for the decomposition");
    for (double q : c.probs)
      if (!(q > 0.0 && q < 1.0)) v.push_back("--probs entries must lie in (0, 1)");
  }

  require_file(c.network_path, "--network", v);
  require_file(c.attributes_path, "--attributes", v);
  require_file(c.dyad_covariates_path, "--dyad-covariates", v);
  require_file(c.node_covariates_path, "--node-covariates", v);
  require_file(c.params_path, "--params", v);
  require_file(c.prior_path, "--prior", v);
  require_file(c.samples_path, "--samples", v);

  if (!v.empty()) {
    std::string msg = std::string(subcommand_name(s)) + ": invalid configuration";
    for (const auto& line : v) msg += "\n  - " + line;
    throw ValidationError(msg);
  }
  return c;
}

Dataset load_dataset(const RunConfig& config, bool echo) {
  NetworkCsvOptions options;
  options.directed = config.mode.directed;
  options.dense_zero = config.dense_zero;
  NetworkSeries network = read_network_csv(config.network_path, options);
  const int m = network.nodes();
  const int T = network.time_points();
  AttributeSeries attributes = config.attributes_path.empty() ? AttributeSeries::empty(m, T)
                                                               : read_attributes_csv(config.attributes_path, m, T);
  std::optional<Matrix> dyad;
  std::optional<Matrix> node;
  if (!config.dyad_covariates_path.empty()) dyad = read_dyad_covariates_csv(config.dyad_covariates_path, m, config.mode.directed);
  if (!config.node_covariates_path.empty()) node = read_node_covariates_csv(config.node_covariates_path, m);
  CovariateSpec covariates(m, config.mode.directed, std::move(dyad), std::move(node));
  if (echo) {
    std::cerr << "loaded m=" << m << " n=" << T - 1 << " p=" << attributes.dims()
              << " missing_network=" << network.missing_count() << " dyad_covariates=" << covariates.dyad_dim()
              << " node_covariates=" << covariates.node_dim() << '\n';
  }
  return Dataset{std::move(network), std::move(attributes), std::move(covariates)};
}

void run_simulate(const RunConfig& config) {
  SimConfig sim;
  sim.m = config.m;
  sim.n = config.n;
  sim.p = config.p;
  sim.mode = config.mode;
  sim.burn_in = config.burn_in_steps;
  sim.seed = config.seed;
  std::optional<Matrix> dyad;
  std::optional<Matrix> node;
  if (!config.dyad_covariates_path.empty())
    dyad = read_dyad_covariates_csv(config.dyad_covariates_path, config.m, config.mode.directed);
  if (!config.node_covariates_path.empty()) node = read_node_covariates_csv(config.node_covariates_path, config.m);
  sim.covariates = CovariateSpec(config.m, config.mode.directed, std::move(dyad), std::move(node));
  const int q_dyad = sim.covariates->dyad_dim();
  const int q_node = sim.covariates->node_dim();
  sim.params = config.params_path.empty()
                   ? default_params(config.mode, *sim.covariates, config.p)
                   : params_from_json(read_json_file(config.params_path), config.mode, q_dyad, q_node, config.p);
  const auto make_cuts = [](const std::vector<double>& interior) {
    Thresholds t{{-kInf}};
    if (interior.empty()) t.cuts.push_back(0.0);
    for (double c : interior) t.cuts.push_back(c);
    t.cuts.push_back(kInf);
    return t;
  };
  if (config.mode.network_scale == NetworkScale::ordinal) sim.network_cuts = make_cuts(config.network_cuts);
  if (config.mode.attribute_scale == AttributeScale::ordinal)
    sim.attribute_cuts.assign(static_cast<std::size_t>(config.p), make_cuts(config.attribute_cuts));

  const Simulation out = simulate(sim);
  const std::string prefix = config.out_prefix;
  write_network_csv(prefix + "_network.csv", out.data.network);
  if (config.p > 0) {
    if (config.mode.attribute_scale == AttributeScale::latent) write_latent_csv(prefix + "_latent.csv", out.W);
    else write_attributes_csv(prefix + "_attributes.csv", out.data.attributes);
  }
  Json j;
  j["m"] = config.m;
  j["n"] = config.n;
  j["p"] = config.p;
  j["seed"] = config.seed;
  j["mode"] = mode_to_json(config.mode);
  j["params"] = params_to_json(sim.params, config.mode);
  if (sim.network_cuts) j["network_cuts"] = std::vector<double>(sim.network_cuts->cuts.begin() + 1, sim.network_cuts->cuts.end() - 1);
  if (!config.attribute_cuts.empty() || config.mode.attribute_scale == AttributeScale::ordinal)
    j["attribute_cuts"] = std::vector<double>(sim.attribute_cuts.front().cuts.begin() + 1, sim.attribute_cuts.front().cuts.end() - 1);
  write_json_file(prefix + "_params.json", j);
  std::cout << "wrote " << prefix << "_network.csv";
  if (config.p > 0)
    std::cout << ", " << prefix << (config.mode.attribute_scale == AttributeScale::latent ? "_latent.csv" : "_attributes.csv");
  std::cout << ", " << prefix << "_params.json\n";
}

void run_fit_mle(const RunConfig& config) {
  const Dataset data = load_dataset(config);
  const MleFit fit = fit_mle(data, config.mode, config.solve);
  Json report = mle_report_json(fit, config.mode, data.covariates.dyad_dim(), data.covariates.node_dim(),
                                data.attributes.dims());
  write_json_file(config.out_path, report);
  std::cout << "alpha1 = " << format_double(fit.params.alpha1);
  if (fit.params.alpha2) std::cout << ", alpha2 = " << format_double(*fit.params.alpha2);
  std::cout << ", sigma2 = " << format_double(fit.params.sigma2) << "\nwrote " << config.out_path << '\n';
}

namespace {

PriorSpec load_prior(const RunConfig& config) {
  return config.prior_path.empty() ? PriorSpec{} : prior_from_json(read_json_file(config.prior_path));
}

SamplerConfig sampler_for(const RunConfig& config) {
  SamplerConfig s = config.sampler;
  if (!config.network_levels.empty()) s.network_levels = OrdinalLevels{config.network_levels};
  if (!config.attribute_levels.empty()) s.attribute_levels.clear();
  return s;
}

}  // namespace

void run_fit_bayes(const RunConfig& config) {
  const Dataset data = load_dataset(config);
  SamplerConfig sampler = sampler_for(config);
  if (!config.attribute_levels.empty())
    sampler.attribute_levels.assign(static_cast<std::size_t>(data.attributes.dims()), OrdinalLevels{config.attribute_levels});
  sampler.store_latent_draws = false;
  const PosteriorSamples samples = run_chain(data, config.mode, load_prior(config), sampler);
  write_samples_ndjson(config.out_path, samples);
  if (!config.export_latent_path.empty()) write_latent_csv(config.export_latent_path, samples.attribute_mean);
  std::cout << "wrote " << samples.draws.size() << " draws to " << config.out_path << '\n';
}

void run_diagnose(const RunConfig& config) {
  Json report;
  std::optional<McrParams> params;
  ModelMode mode = config.mode;
  if (!config.samples_path.empty()) {
    const PosteriorSamples samples = read_samples_ndjson(config.samples_path);
    mode = samples.mode;
    const QuantileTable table = posterior_quantiles(samples, config.probs);
    const Matrix draws = draw_matrix(samples);
    report["draws"] = samples.draws.size();
    report["mode"] = mode_to_json(mode);
    Json rows = quantiles_to_json(table);
    for (std::size_t r = 0; r < table.names.size(); ++r) {
      const Vector col = draws.col(static_cast<Eigen::Index>(r));
      rows[r]["mean"] = col.mean();
      if (col.size() >= 100) {
        const EssResult ess = effective_sample_size(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        rows[r]["ess"] = ess.value;
        if (ess.degenerate) rows[r]["degenerate"] = true;
      } else {
        rows[r]["ess"] = nullptr;
      }
    }
    report["parameters"] = std::move(rows);
    if (draws.rows() < 100) std::cerr << "note: fewer than 100 draws, effective sample sizes omitted\n";
    params = samples.posterior_mean();
  }
  if (!config.network_path.empty()) {
    RunConfig data_config = config;
    data_config.mode = mode;
    if (!config.params_path.empty()) {
      const Json j = read_json_file(config.params_path);
      if (j.contains("mode")) data_config.mode = mode_from_json(j.at("mode"));
      else data_config.mode = config.mode;
      mode = data_config.mode;
    }
    const Dataset data = load_dataset(data_config);
    if (!config.params_path.empty())
      params = params_from_json(read_json_file(config.params_path), mode, data.covariates.dyad_dim(),
                                data.covariates.node_dim(), data.attributes.dims());
    if (mode.network_scale != NetworkScale::gaussian || mode.attribute_scale != AttributeScale::gaussian) {
      std::cerr << "note: the decomposition needs observed Gaussian data; skipped\n";
    } else {
      const DecompositionReport dec = sum_of_squares_decomposition(data.panel(), *params, mode);
      report["decomposition"] = decomposition_to_json(dec);
      std::cout << "network: intercept " << format_double(dec.network.intercept) << "%, autoregressive "
                << format_double(dec.network.autoregressive) << "%, homophily " << format_double(dec.network.coupling)
                << "%, error " << format_double(dec.network.error) << "%\n";
    }
  }
  write_json_file(config.out_path, report);
  std::cout << "wrote " << config.out_path << '\n';
}

void run_forecast_study(const RunConfig& config) {
  const Dataset data = load_dataset(config);
  std::vector<int> holdouts = config.holdouts;
  if (holdouts.empty())
    for (int t = 2; t < data.network.time_points(); ++t) holdouts.push_back(t);
  ForecastStudyOptions options;
  options.method = config.method;
  options.prior = load_prior(config);
  options.sampler = sampler_for(config);
  if (!config.attribute_levels.empty())
    options.sampler.attribute_levels.assign(static_cast<std::size_t>(data.attributes.dims()),
                                            OrdinalLevels{config.attribute_levels});
  options.solve = config.solve;
  const ForecastComparison cmp = forecast_study(data, config.mode, holdouts, options);
  Json report = forecast_comparison_to_json(cmp);
  report["method"] = to_string(config.method);
  write_json_file(config.out_path, report);
  for (int k = 0; k < kSubmodels; ++k) {
    std::cout << submodel_name(k) << ": " << format_double(cmp.average(k));
    if (k > 0) std::cout << " (" << format_relative(cmp.average(k), cmp.average(0)) << ")";
    std::cout << '\n';
  }
}

int cli_main(int argc, const char* const* argv) {
  try {
    const RunConfig config = parse_and_validate(argc, argv);
    if (config.threads) omp_set_num_threads(*config.threads);
    switch (config.subcommand) {
      case Subcommand::simulate: run_simulate(config); break;
      case Subcommand::fit_mle: run_fit_mle(config); break;
      case Subcommand::fit_bayes: run_fit_bayes(config); break;
      case Subcommand::diagnose: run_diagnose(config); break;
      case Subcommand::forecast_study: run_forecast_study(config); break;
    }
    return 0;
  } catch (const CLI::Success&) {
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::dimension: return 2;
      case ErrorKind::numerical:
      case ErrorKind::stability: return 3;
      case ErrorKind::io: return 4;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mcr
