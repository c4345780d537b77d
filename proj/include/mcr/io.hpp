#pragma once

// File formats. CSV files are long format with a header row; node ids and
// attribute indices are 1-based, time is 0-based. JSON matrices are
// {"rows": r, "cols": c, "data": [...]} with data in column-major order.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcr/core.hpp"
#include "mcr/diagnostics.hpp"
#include "mcr/gibbs.hpp"
#include "mcr/mle.hpp"

namespace mcr {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

struct NetworkCsvOptions {
  bool directed = false;
  bool dense_zero = false;            // unlisted off-diagonal pairs are 0 instead of missing
  std::optional<int> nodes;
  std::optional<int> time_points;
};

/// Header t,i,j,y. Undirected files may list each pair once in either
/// orientation (both orientations must then agree).
NetworkSeries read_network_csv(const std::string& path, const NetworkCsvOptions& options);
void write_network_csv(const std::string& path, const NetworkSeries& network);

/// Header t,i,k,x; every (t, i, k) must be present.
AttributeSeries read_attributes_csv(const std::string& path, int nodes, int time_points);
void write_attributes_csv(const std::string& path, const AttributeSeries& attributes);

/// Header i,j,s1..sq; returns the (m*m) x q layout used by CovariateSpec.
Matrix read_dyad_covariates_csv(const std::string& path, int nodes, bool directed);
void write_dyad_covariates_csv(const std::string& path, const Matrix& dyad, int nodes, bool directed);
/// Header i,s1..sq.
Matrix read_node_covariates_csv(const std::string& path, int nodes);
void write_node_covariates_csv(const std::string& path, const Matrix& node);

/// Header t,i,k,xhat.
void write_latent_csv(const std::string& path, const std::vector<Matrix>& trajectories);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);
void write_text_file(const std::string& path, const std::string& text);

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j, const std::string& what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

Json mode_to_json(const ModelMode& mode);
ModelMode mode_from_json(const Json& j);

Json params_to_json(const McrParams& params, const ModelMode& mode);
/// Accepts a bare parameter object or any report with a "params" member.
McrParams params_from_json(const Json& j, const ModelMode& mode, int q_dyad, int q_node, int p);

PriorSpec prior_from_json(const Json& j);

Json mle_report_json(const MleFit& fit, const ModelMode& mode, int q_dyad, int q_node, int p);

Json draw_to_json(const Draw& draw, const ModelMode& mode);
/// One JSON object per retained draw.
void write_samples_ndjson(const std::string& path, const PosteriorSamples& samples);
PosteriorSamples read_samples_ndjson(const std::string& path);

Json quantiles_to_json(const QuantileTable& table);
Json decomposition_to_json(const DecompositionReport& report);
Json forecast_comparison_to_json(const ForecastComparison& comparison);

}  // namespace mcr
