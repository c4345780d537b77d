#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>

#include "helpers.hpp"
#include "mcr/cli.hpp"
#include "mcr/io.hpp"

using namespace mcr;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mcr_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "mcr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_and_validate(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123, 0.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("simulate, write, load reproduces the tensors bit-exactly") {
  for (bool directed : {false, true}) {
    ModelMode mode;
    mode.directed = directed;
    const auto sim = simulate_random(1, 5, 3, 2, mode, false, false);
    const auto net = scratch("net.csv"), attr = scratch("attr.csv"), dy = scratch("dyad.csv"), nd = scratch("node.csv");
    write_network_csv(net, sim.data.network);
    write_attributes_csv(attr, sim.data.attributes);
    write_dyad_covariates_csv(dy, *sim.data.covariates.dyad_matrix(), 5, directed);
    write_node_covariates_csv(nd, sim.data.covariates.node_matrix());
    NetworkCsvOptions opt;
    opt.directed = directed;
    const NetworkSeries n2 = read_network_csv(net, opt);
    const AttributeSeries a2 = read_attributes_csv(attr, 5, 4);
    for (int t = 0; t < 4; ++t) {
      CHECK(n2.slice(t) == sim.data.network.slice(t));
      CHECK(a2.slice(t) == sim.data.attributes.slice(t));
    }
    CHECK(n2.fully_observed());
    CHECK(n2.missing_count() == 0);
    CHECK(read_dyad_covariates_csv(dy, 5, directed) == *sim.data.covariates.dyad_matrix());
    CHECK(read_node_covariates_csv(nd, 5) == sim.data.covariates.node_matrix());
  }
}

TEST_CASE("network CSV errors carry line numbers") {
  const auto p = scratch("bad.csv");
  NetworkCsvOptions opt;
  write(p, "t,i,j,y\n0,1,2,1.0\n0,1,2,2.0\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find("bad.csv:3: duplicate entry (t=0, i=1, j=2)") != std::string::npos);
  write(p, "t,i,j,y\n0,1,2,1.0\n0,2,1,2.0\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find("disagrees") != std::string::npos);
  opt.directed = true;
  CHECK_NOTHROW(read_network_csv(p, opt));
  opt.nodes = 3;
  write(p, "t,i,j,y\n0,1,4,1.0\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find(":2: node id out of range") != std::string::npos);
  write(p, "t,i,j,y\n0,2,2,1.0\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find("diagonal") != std::string::npos);
  write(p, "t,i,j,y\n0,1,2,abc\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find("invalid value 'abc'") != std::string::npos);
  write(p, "a,b,c\n");
  CHECK(error_of([&] { read_network_csv(p, opt); }).find("unexpected header") != std::string::npos);
  CHECK_THROWS_AS(read_network_csv(scratch("missing_file.csv"), opt), IoError);
}

TEST_CASE("unlisted pairs are missing unless dense-zero") {
  const auto p = scratch("sparse.csv");
  write(p, "t,i,j,y\n0,1,2,1.0\n1,2,3,2.0\n");
  NetworkCsvOptions opt;
  const NetworkSeries a = read_network_csv(p, opt);
  CHECK(a.nodes() == 3);
  CHECK(a.time_points() == 2);
  CHECK(a.missing_count() == 4);
  opt.dense_zero = true;
  CHECK(read_network_csv(p, opt).missing_count() == 0);
}

TEST_CASE("attribute files must be complete") {
  const auto p = scratch("attr_bad.csv");
  write(p, "t,i,k,x\n0,1,1,0.5\n0,2,1,0.5\n1,1,1,0.5\n");
  CHECK(error_of([&] { read_attributes_csv(p, 2, 2); }).find("missing attribute value (t=1, i=2, k=1)") !=
        std::string::npos);
}

TEST_CASE("parameters, samples and reports round trip through JSON") {
  ModelMode mode;
  mode.directed = true;
  Rng rng(3);
  const CovariateSpec cov = random_covariates(rng, 4, true, false, false);
  const McrParams th = random_params(rng, mode, cov, 2);
  const Json j = params_to_json(th, mode);
  const McrParams back = params_from_json(Json{{"params", j}}, mode, cov.dyad_dim(), cov.node_dim(), 2);
  CHECK(back.gamma == th.gamma);
  CHECK(back.H == th.H);
  CHECK(*back.C2 == *th.C2);
  CHECK(back.Sigma == th.Sigma);
  CHECK_THROWS_AS(params_from_json(j, ModelMode{}, cov.dyad_dim(), cov.node_dim(), 2), ValidationError);

  PosteriorSamples s;
  s.mode = mode;
  for (int k = 0; k < 3; ++k) {
    Draw d;
    d.iteration = k;
    d.params = th;
    d.params.alpha1 += k;
    d.network_cuts = {-kInf, 0.25, kInf};
    s.draws.push_back(d);
  }
  const auto path = scratch("s.ndjson");
  write_samples_ndjson(path, s);
  const PosteriorSamples r = read_samples_ndjson(path);
  REQUIRE(r.draws.size() == 3);
  CHECK(r.draws[2].params.alpha1 == th.alpha1 + 2);
  CHECK(r.draws[1].network_cuts == s.draws[1].network_cuts);
  CHECK(r.mode.directed);
}

TEST_CASE("prior files reject unknown keys") {
  CHECK_THROWS_AS(prior_from_json(Json{{"nu_0", 2}}), ValidationError);
  const PriorSpec p = prior_from_json(Json{{"nu0", 3.0}, {"beta_variance", 1e6}});
  CHECK(p.nu0 == 3.0);
  CHECK(p.beta_variance == 1e6);
}

TEST_CASE("command-line validation") {
  const RunConfig c = parse({"simulate", "--m", "10", "--n", "20", "--p", "2", "--seed", "7"});
  CHECK(c.subcommand == Subcommand::simulate);
  CHECK(c.m == 10);
  CHECK(c.seed == 7);

  const auto net = scratch("cli_net.csv"), attr = scratch("cli_attr.csv");
  write(net, "t,i,j,y\n0,1,2,1\n");
  write(attr, "t,i,k,x\n0,1,1,1\n");
  const std::string both = error_of([&] {
    parse({"fit-bayes", "--network", net.string(), "--latent-dim", "2", "--attributes", attr.string(), "--out", "x",
           "--iters", "5", "--burn-in", "10"});
  });
  CHECK(both.find("mutually exclusive") != std::string::npos);
  CHECK(both.find("--iters must exceed --burn-in") != std::string::npos);  // every violation is listed

  CHECK(error_of([&] { parse({"fit-mle", "--network", net.string(), "--network-scale", "ordinal", "--out", "x"}); })
            .find("Gaussian") != std::string::npos);
  CHECK(error_of([&] { parse({"fit-mle", "--network", "nope.csv", "--out", "x"}); }).find("no such file") !=
        std::string::npos);
  CHECK_THROWS_AS(parse({"simulate", "--m", "3", "--n", "2", "--bogus"}), ValidationError);
  CHECK(error_of([&] { parse({"fit-bayes", "--network", net.string(), "--export-latent", "a.csv", "--out", "x"}); })
            .find("--export-latent") != std::string::npos);
}

TEST_CASE("exit codes") {
  std::vector<const char*> bad{"mcr", "fit-mle", "--network", "nope.csv", "--out", "x"};
  CHECK(cli_main(static_cast<int>(bad.size()), bad.data()) == 2);
  const auto net = scratch("rank.csv");
  write(net, "t,i,j,y\n0,1,2,1\n0,1,3,2\n0,2,3,0.5\n1,1,2,1\n1,1,3,2\n1,2,3,3\n");
  const std::string out = scratch("rank.json").string();
  std::vector<const char*> deficient{"mcr", "fit-mle", "--network", net.c_str(), "--out", out.c_str()};
  CHECK(cli_main(static_cast<int>(deficient.size()), deficient.data()) == 3);
  std::vector<const char*> unwritable{"mcr", "simulate", "--m", "3", "--n", "2", "--out-prefix", "/nonexistent/dir/x"};
  CHECK(cli_main(static_cast<int>(unwritable.size()), unwritable.data()) == 4);
}
