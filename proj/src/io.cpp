#include "mcr/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace mcr {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CsvReader {
 public:
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open '" + path + "' for reading");
  }

  /// Reads the header and checks its leading columns; returns all header names.
  std::vector<std::string> header(const std::vector<std::string>& leading, bool allow_extra) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      auto names = split(line);
      bool ok = names.size() >= leading.size() && (allow_extra || names.size() == leading.size());
      for (std::size_t k = 0; ok && k < leading.size(); ++k) ok = names[k] == leading[k];
      if (!ok) fail("unexpected header '" + trim(line) + "'");
      return names;
    }
    fail("file is empty");
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      fields = split(line);
      return true;
    }
    return false;
  }

  long parse_int(const std::string& s, const char* what) const {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(std::string("invalid ") + what + " '" + s + "'");
    return v;
  }

  double parse_double(const std::string& s, const char* what) const {
    double v = 0.0;
    const char* begin = s.data();
    if (!s.empty() && s[0] == '+') ++begin;
    const auto res = std::from_chars(begin, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      fail(std::string("invalid ") + what + " '" + s + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(path_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  int line() const { return line_no_; }

 private:
  std::string path_;
  std::ifstream in_;
  int line_no_ = 0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string pair_name(long t, long i, long j) {
  return "(t=" + std::to_string(t) + ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")";
}

}  // namespace

// --- CSV ------------------------------------------------------------------------------

NetworkSeries read_network_csv(const std::string& path, const NetworkCsvOptions& options) {
  CsvReader reader(path);
  reader.header({"t", "i", "j", "y"}, false);
  struct Row {
    long t, i, j;
    double y;
    int line;
  };
  std::vector<Row> rows;
  std::vector<std::string> f;
  long max_node = 0;
  long max_t = -1;
  std::set<std::tuple<long, long, long>> seen;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail("expected 4 fields, found " + std::to_string(f.size()));
    Row r{reader.parse_int(f[0], "time index"), reader.parse_int(f[1], "node id"), reader.parse_int(f[2], "node id"),
          reader.parse_double(f[3], "value"), reader.line()};
    if (r.t < 0) reader.fail("negative time index");
    if (r.i < 1 || r.j < 1) reader.fail("node ids are 1-based");
    if (options.nodes && (r.i > *options.nodes || r.j > *options.nodes))
      reader.fail("node id out of range 1.." + std::to_string(*options.nodes));
    if (options.time_points && r.t >= *options.time_points)
      reader.fail("time index out of range 0.." + std::to_string(*options.time_points - 1));
    if (r.i == r.j) reader.fail("diagonal entry " + pair_name(r.t, r.i, r.j) + " is undefined");
    if (!seen.insert({r.t, r.i, r.j}).second) reader.fail("duplicate entry " + pair_name(r.t, r.i, r.j));
    max_node = std::max({max_node, r.i, r.j});
    max_t = std::max(max_t, r.t);
    rows.push_back(r);
  }
  const int m = options.nodes ? *options.nodes : static_cast<int>(max_node);
  const int T = options.time_points ? *options.time_points : static_cast<int>(max_t + 1);
  if (m < 2) throw ValidationError(path + ": need at least two nodes");
  if (T < 1) throw ValidationError(path + ": no time points");

  std::vector<Matrix> slices(static_cast<std::size_t>(T), Matrix::Zero(m, m));
  std::vector<Mask> masks(static_cast<std::size_t>(T), Mask::Constant(m, m, options.dense_zero));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) masks[t](i, i) = true;
  std::vector<Mask> listed(static_cast<std::size_t>(T), Mask::Constant(m, m, false));
  for (const Row& r : rows) {
    const int t = static_cast<int>(r.t);
    const int i = static_cast<int>(r.i - 1);
    const int j = static_cast<int>(r.j - 1);
    if (!options.directed && listed[t](j, i) && slices[t](j, i) != r.y)
      throw ValidationError(path + ":" + std::to_string(r.line) + ": undirected value for " +
                            pair_name(r.t, r.i, r.j) + " disagrees with the mirrored entry");
    slices[t](i, j) = r.y;
    masks[t](i, j) = true;
    listed[t](i, j) = true;
    if (!options.directed) {
      slices[t](j, i) = r.y;
      masks[t](j, i) = true;
      listed[t](j, i) = true;
    }
  }
  return NetworkSeries(std::move(slices), options.directed, std::move(masks));
}

void write_network_csv(const std::string& path, const NetworkSeries& network) {
  auto out = open_out(path);
  out << "t,i,j,y\n";
  const int m = network.nodes();
  for (int t = 0; t < network.time_points(); ++t)
    for (int i = 0; i < m; ++i)
      for (int j = network.directed() ? 0 : i + 1; j < m; ++j) {
        if (i == j || !network.observed(t, i, j)) continue;
        out << t << ',' << i + 1 << ',' << j + 1 << ',' << format_double(network(t, i, j)) << '\n';
      }
  close_out(out, path);
}

AttributeSeries read_attributes_csv(const std::string& path, int nodes, int time_points) {
  CsvReader reader(path);
  reader.header({"t", "i", "k", "x"}, false);
  std::map<std::tuple<long, long, long>, double> values;
  long p = 0;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail("expected 4 fields, found " + std::to_string(f.size()));
    const long t = reader.parse_int(f[0], "time index");
    const long i = reader.parse_int(f[1], "node id");
    const long k = reader.parse_int(f[2], "attribute index");
    const double x = reader.parse_double(f[3], "value");
    if (t < 0 || t >= time_points) reader.fail("time index out of range 0.." + std::to_string(time_points - 1));
    if (i < 1 || i > nodes) reader.fail("node id out of range 1.." + std::to_string(nodes));
    if (k < 1) reader.fail("attribute indices are 1-based");
    if (!values.emplace(std::make_tuple(t, i, k), x).second)
      reader.fail("duplicate entry (t=" + std::to_string(t) + ", i=" + std::to_string(i) + ", k=" + std::to_string(k) +
                  ")");
    p = std::max(p, k);
  }
  if (p == 0) throw ValidationError(path + ": no attribute values");
  std::vector<Matrix> slices(static_cast<std::size_t>(time_points), Matrix::Zero(nodes, p));
  for (int t = 0; t < time_points; ++t)
    for (int i = 1; i <= nodes; ++i)
      for (int k = 1; k <= p; ++k) {
        const auto it = values.find({t, i, k});
        if (it == values.end())
          throw ValidationError(path + ": missing attribute value (t=" + std::to_string(t) + ", i=" +
                                std::to_string(i) + ", k=" + std::to_string(k) + ")");
        slices[t](i - 1, k - 1) = it->second;
      }
  return AttributeSeries(std::move(slices));
}

void write_attributes_csv(const std::string& path, const AttributeSeries& attributes) {
  auto out = open_out(path);
  out << "t,i,k,x\n";
  for (int t = 0; t < attributes.time_points(); ++t)
    for (int i = 0; i < attributes.nodes(); ++i)
      for (int k = 0; k < attributes.dims(); ++k)
        out << t << ',' << i + 1 << ',' << k + 1 << ',' << format_double(attributes(t, i, k)) << '\n';
  close_out(out, path);
}

Matrix read_dyad_covariates_csv(const std::string& path, int nodes, bool directed) {
  CsvReader reader(path);
  const auto names = reader.header({"i", "j"}, true);
  const int q = static_cast<int>(names.size()) - 2;
  if (q < 1) reader.fail("no covariate columns");
  Matrix S = Matrix::Zero(static_cast<Eigen::Index>(nodes) * nodes, q);
  Mask have = Mask::Constant(nodes, nodes, false);
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (static_cast<int>(f.size()) != q + 2) reader.fail("expected " + std::to_string(q + 2) + " fields");
    const long i = reader.parse_int(f[0], "node id");
    const long j = reader.parse_int(f[1], "node id");
    if (i < 1 || i > nodes || j < 1 || j > nodes) reader.fail("node id out of range 1.." + std::to_string(nodes));
    if (i == j) reader.fail("diagonal covariate row");
    if (have(i - 1, j - 1) && (directed || have(j - 1, i - 1)))
      reader.fail("duplicate covariate row (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
    Vector s(q);
    for (int c = 0; c < q; ++c) s(c) = reader.parse_double(f[c + 2], "covariate");
    const auto row = [&](long a, long b) { return (a - 1) + static_cast<long>(nodes) * (b - 1); };
    if (!directed && have(j - 1, i - 1)) {
      if (S.row(row(j, i)).transpose() != s) reader.fail("undirected covariates disagree with the mirrored row");
    }
    S.row(row(i, j)) = s.transpose();
    have(i - 1, j - 1) = true;
    if (!directed) {
      S.row(row(j, i)) = s.transpose();
      have(j - 1, i - 1) = true;
    }
  }
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j && !have(i, j))
        throw ValidationError(path + ": missing covariate row for (i=" + std::to_string(i + 1) +
                              ", j=" + std::to_string(j + 1) + ")");
  return S;
}

void write_dyad_covariates_csv(const std::string& path, const Matrix& dyad, int nodes, bool directed) {
  auto out = open_out(path);
  out << "i,j";
  for (Eigen::Index c = 0; c < dyad.cols(); ++c) out << ",s" << c + 1;
  out << '\n';
  for (int i = 0; i < nodes; ++i)
    for (int j = directed ? 0 : i + 1; j < nodes; ++j) {
      if (i == j) continue;
      out << i + 1 << ',' << j + 1;
      for (Eigen::Index c = 0; c < dyad.cols(); ++c) out << ',' << format_double(dyad(i + nodes * j, c));
      out << '\n';
    }
  close_out(out, path);
}

Matrix read_node_covariates_csv(const std::string& path, int nodes) {
  CsvReader reader(path);
  const auto names = reader.header({"i"}, true);
  const int q = static_cast<int>(names.size()) - 1;
  if (q < 1) reader.fail("no covariate columns");
  Matrix S = Matrix::Zero(nodes, q);
  std::vector<bool> have(static_cast<std::size_t>(nodes), false);
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (static_cast<int>(f.size()) != q + 1) reader.fail("expected " + std::to_string(q + 1) + " fields");
    const long i = reader.parse_int(f[0], "node id");
    if (i < 1 || i > nodes) reader.fail("node id out of range 1.." + std::to_string(nodes));
    if (have[i - 1]) reader.fail("duplicate covariate row for node " + std::to_string(i));
    for (int c = 0; c < q; ++c) S(i - 1, c) = reader.parse_double(f[c + 1], "covariate");
    have[i - 1] = true;
  }
  for (int i = 0; i < nodes; ++i)
    if (!have[i]) throw ValidationError(path + ": missing covariate row for node " + std::to_string(i + 1));
  return S;
}

void write_node_covariates_csv(const std::string& path, const Matrix& node) {
  auto out = open_out(path);
  out << "i";
  for (Eigen::Index c = 0; c < node.cols(); ++c) out << ",s" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < node.rows(); ++i) {
    out << i + 1;
    for (Eigen::Index c = 0; c < node.cols(); ++c) out << ',' << format_double(node(i, c));
    out << '\n';
  }
  close_out(out, path);
}

void write_latent_csv(const std::string& path, const std::vector<Matrix>& trajectories) {
  auto out = open_out(path);
  out << "t,i,k,xhat\n";
  for (std::size_t t = 0; t < trajectories.size(); ++t)
    for (Eigen::Index i = 0; i < trajectories[t].rows(); ++i)
      for (Eigen::Index k = 0; k < trajectories[t].cols(); ++k)
        out << t << ',' << i + 1 << ',' << k + 1 << ',' << format_double(trajectories[t](i, k)) << '\n';
  close_out(out, path);
}

// --- JSON -------------------------------------------------------------------------------

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& value) { write_text_file(path, value.dump(2) + "\n"); }

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  close_out(out, path);
}

Json matrix_to_json(const Matrix& M) {
  Json data = Json::array();
  for (Eigen::Index k = 0; k < M.size(); ++k) data.push_back(M.data()[k]);
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  try {
    const long rows = j.at("rows").get<long>();
    const long cols = j.at("cols").get<long>();
    const Json& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != rows * cols)
      throw ValidationError(what + ": data length does not equal rows * cols");
    Matrix M(rows, cols);
    for (long k = 0; k < rows * cols; ++k) M.data()[k] = data.at(k).get<double>();
    return M;
  } catch (const Json::exception& e) {
    throw ValidationError(what + ": malformed matrix: " + e.what());
  }
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  try {
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  } catch (const Json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
  return v;
}

Json mode_to_json(const ModelMode& mode) {
  return Json{{"directed", mode.directed},
              {"network_scale", to_string(mode.network_scale)},
              {"attribute_scale", to_string(mode.attribute_scale)},
              {"autoregression", mode.autoregression},
              {"contagion", mode.contagion}};
}

ModelMode mode_from_json(const Json& j) {
  ModelMode mode;
  try {
    mode.directed = j.value("directed", false);
    mode.network_scale = parse_network_scale(j.value("network_scale", std::string("gaussian")));
    mode.attribute_scale = parse_attribute_scale(j.value("attribute_scale", std::string("gaussian")));
    mode.autoregression = j.value("autoregression", true);
    mode.contagion = j.value("contagion", true);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed mode: ") + e.what());
  }
  return mode;
}

Json params_to_json(const McrParams& params, const ModelMode& mode) {
  Json j;
  j["gamma"] = vector_to_json(params.gamma);
  j["alpha1"] = params.alpha1;
  if (mode.directed) j["alpha2"] = params.alpha2.value_or(0.0);
  j["H"] = matrix_to_json(params.H);
  j["Gamma"] = matrix_to_json(params.Gamma);
  j["A"] = matrix_to_json(params.A);
  j["C1"] = matrix_to_json(params.C1);
  if (mode.directed) j["C2"] = matrix_to_json(params.C2.value_or(Matrix::Zero(params.dims(), params.dims())));
  j["sigma2"] = params.sigma2;
  j["Sigma"] = matrix_to_json(params.Sigma);
  return j;
}

McrParams params_from_json(const Json& input, const ModelMode& mode, int q_dyad, int q_node, int p) {
  const Json& j = input.contains("params") ? input.at("params") : input;
  if (!j.is_object()) throw ValidationError("parameters must be a JSON object");
  McrParams params = McrParams::zeros(mode, q_dyad, q_node, p);
  try {
    if (j.contains("gamma")) params.gamma = vector_from_json(j.at("gamma"), "gamma");
    if (j.contains("alpha1")) params.alpha1 = j.at("alpha1").get<double>();
    if (j.contains("alpha2")) {
      if (!mode.directed) throw ValidationError("alpha2 is only defined for directed networks");
      params.alpha2 = j.at("alpha2").get<double>();
    }
    if (j.contains("H")) params.H = matrix_from_json(j.at("H"), "H");
    if (j.contains("Gamma")) params.Gamma = matrix_from_json(j.at("Gamma"), "Gamma");
    if (j.contains("A")) params.A = matrix_from_json(j.at("A"), "A");
    if (j.contains("C1")) params.C1 = matrix_from_json(j.at("C1"), "C1");
    if (j.contains("C")) params.C1 = matrix_from_json(j.at("C"), "C");
    if (j.contains("C2")) {
      if (!mode.directed) throw ValidationError("C2 is only defined for directed networks");
      params.C2 = matrix_from_json(j.at("C2"), "C2");
    }
    if (j.contains("sigma2")) params.sigma2 = j.at("sigma2").get<double>();
    if (j.contains("Sigma")) params.Sigma = matrix_from_json(j.at("Sigma"), "Sigma");
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed parameters: ") + e.what());
  }
  params.validate(mode, q_dyad, q_node);
  return params;
}

PriorSpec prior_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("prior must be a JSON object");
  static const std::set<std::string> known{"V_beta",         "V_b",          "beta_variance",
                                           "b_variance",     "nu0",          "sigma0_sq",
                                           "S0",             "eta0",         "latent_mean",
                                           "latent_variance", "cut_mean",    "cut_variance",
                                           "flat_initial_latent", "attribute_entry_prior",
                                           "initial_coefficient_variance"};
  std::string unknown;
  for (const auto& item : j.items())
    if (!known.count(item.key())) unknown += (unknown.empty() ? "" : ", ") + item.key();
  if (!unknown.empty()) throw ValidationError("unknown prior keys: " + unknown);
  PriorSpec prior;
  try {
    if (j.contains("V_beta")) prior.V_beta = matrix_from_json(j.at("V_beta"), "V_beta");
    if (j.contains("V_b")) prior.V_b = matrix_from_json(j.at("V_b"), "V_b");
    prior.beta_variance = j.value("beta_variance", prior.beta_variance);
    prior.b_variance = j.value("b_variance", prior.b_variance);
    prior.nu0 = j.value("nu0", prior.nu0);
    prior.sigma0_sq = j.value("sigma0_sq", prior.sigma0_sq);
    if (j.contains("S0")) prior.S0 = matrix_from_json(j.at("S0"), "S0");
    if (j.contains("eta0")) prior.eta0 = j.at("eta0").get<double>();
    prior.latent.mean = j.value("latent_mean", prior.latent.mean);
    prior.latent.variance = j.value("latent_variance", prior.latent.variance);
    prior.cut_mean = j.value("cut_mean", prior.cut_mean);
    prior.cut_variance = j.value("cut_variance", prior.cut_variance);
    prior.flat_initial_latent = j.value("flat_initial_latent", prior.flat_initial_latent);
    prior.attribute_entry_prior = j.value("attribute_entry_prior", prior.attribute_entry_prior);
    prior.initial_coefficient_variance = j.value("initial_coefficient_variance", prior.initial_coefficient_variance);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed prior: ") + e.what());
  }
  return prior;
}

Json mle_report_json(const MleFit& fit, const ModelMode& mode, int q_dyad, int q_node, int p) {
  Json j;
  j["mode"] = mode_to_json(mode);
  j["params"] = params_to_json(fit.params, mode);
  Json names = Json::array();
  for (const auto& n : network_column_names(q_dyad, p, mode)) names.push_back(n);
  j["beta_names"] = std::move(names);
  j["beta_standard_errors"] = vector_to_json(fit.beta_standard_errors);
  if (p > 0) {
    Json anames = Json::array();
    for (const auto& n : attribute_column_names(q_node, p, mode)) anames.push_back(n);
    j["attribute_names"] = std::move(anames);
    j["B_standard_errors"] = matrix_to_json(fit.B_standard_errors);
    j["rss_attributes"] = matrix_to_json(fit.rss_attributes);
  }
  j["rss_network"] = fit.rss_network;
  j["dyad_count"] = fit.dyad_count;
  j["node_time_count"] = fit.node_time_count;
  j["condition_numbers"] = Json{{"network", fit.network_condition}, {"attributes", fit.attribute_condition}};
  return j;
}

namespace {

Json cuts_to_json(const std::vector<double>& cuts) {
  Json out = Json::array();
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) out.push_back(cuts[k]);
  return out;
}

std::vector<double> cuts_from_json(const Json& j) {
  std::vector<double> cuts{-kInf};
  for (const auto& v : j) cuts.push_back(v.get<double>());
  cuts.push_back(kInf);
  return cuts;
}

}  // namespace

Json draw_to_json(const Draw& draw, const ModelMode& mode) {
  Json j;
  j["chain"] = draw.chain;
  j["iteration"] = draw.iteration;
  j["mode"] = mode_to_json(mode);
  const Json params = params_to_json(draw.params, mode);
  for (const auto& item : params.items()) j[item.key()] = item.value();
  if (!draw.network_cuts.empty()) j["network_cuts"] = cuts_to_json(draw.network_cuts);
  if (!draw.attribute_cuts.empty()) {
    Json a = Json::array();
    for (const auto& c : draw.attribute_cuts) a.push_back(cuts_to_json(c));
    j["attribute_cuts"] = std::move(a);
  }
  if (draw.initial) {
    j["initial"] = Json{{"gamma0", vector_to_json(draw.initial->gamma0)},
                        {"G0", matrix_to_json(draw.initial->G0)},
                        {"tau2", vector_to_json(draw.initial->tau2)}};
  }
  if (!draw.latent.empty()) {
    Json traj = Json::array();
    for (const Matrix& X : draw.latent) traj.push_back(matrix_to_json(X));
    j["latent"] = std::move(traj);
  }
  return j;
}

void write_samples_ndjson(const std::string& path, const PosteriorSamples& samples) {
  auto out = open_out(path);
  for (const Draw& d : samples.draws) out << draw_to_json(d, samples.mode).dump() << '\n';
  close_out(out, path);
}

PosteriorSamples read_samples_ndjson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  PosteriorSamples samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ValidationError(where + ": invalid JSON: " + e.what());
    }
    const ModelMode mode = mode_from_json(j.value("mode", Json::object()));
    if (samples.draws.empty()) samples.mode = mode;
    const int p = j.contains("A") ? static_cast<int>(j.at("A").at("rows").get<long>()) : 0;
    const int q_dyad = j.contains("gamma") ? static_cast<int>(j.at("gamma").size()) : 0;
    const int q_node = j.contains("Gamma") ? static_cast<int>(j.at("Gamma").at("cols").get<long>()) : 0;
    Draw d;
    try {
      d.chain = j.value("chain", 0);
      d.iteration = j.value("iteration", 0);
      d.params = params_from_json(j, mode, q_dyad, q_node, p);
      if (j.contains("network_cuts")) d.network_cuts = cuts_from_json(j.at("network_cuts"));
      if (j.contains("attribute_cuts"))
        for (const auto& c : j.at("attribute_cuts")) d.attribute_cuts.push_back(cuts_from_json(c));
      if (j.contains("initial")) {
        const Json& init = j.at("initial");
        d.initial = InitialStateParams{vector_from_json(init.at("gamma0"), "gamma0"), matrix_from_json(init.at("G0"), "G0"),
                                       vector_from_json(init.at("tau2"), "tau2")};
      }
      if (j.contains("latent"))
        for (const auto& X : j.at("latent")) d.latent.push_back(matrix_from_json(X, "latent"));
    } catch (const Error& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const Json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
    samples.chains = std::max(samples.chains, d.chain + 1);
    samples.draws.push_back(std::move(d));
  }
  if (samples.draws.empty()) throw ValidationError(path + ": no draws");
  return samples;
}

Json quantiles_to_json(const QuantileTable& table) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < table.names.size(); ++r) {
    Json q = Json::object();
    for (std::size_t k = 0; k < table.probs.size(); ++k)
      q[format_double(table.probs[k])] = table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
    rows.push_back(Json{{"name", table.names[r]}, {"quantiles", std::move(q)}});
  }
  return rows;
}

namespace {

Json shares_to_json(const TermShares& s, const char* coupling) {
  return Json{{"intercept", s.intercept}, {"autoregressive", s.autoregressive}, {coupling, s.coupling}, {"error", s.error}};
}

}  // namespace

Json decomposition_to_json(const DecompositionReport& report) {
  Json j;
  j["network"] = shares_to_json(report.network, "homophily");
  if (report.attributes) j["attributes"] = shares_to_json(*report.attributes, "contagion");
  return j;
}

Json forecast_comparison_to_json(const ForecastComparison& c) {
  Json j;
  j["score"] = c.score;
  j["holdouts"] = c.holdouts;
  Json models = Json::array();
  for (int k = 0; k < kSubmodels; ++k) {
    Json per = Json::array();
    for (Eigen::Index h = 0; h < c.errors.rows(); ++h) per.push_back(c.errors(h, k));
    models.push_back(Json{{"model", submodel_name(k)},
                          {"errors", std::move(per)},
                          {"average", c.average(k)},
                          {"relative_percent", c.relative(k)},
                          {"summary", format_relative(c.average(k), c.average(0))}});
  }
  j["models"] = std::move(models);
  return j;
}

}  // namespace mcr
