#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gmlm/cli.hpp"
#include "gmlm/io.hpp"
#include "gmlm/ising.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = gmlm::run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Unique scratch directory per process so parallel ctest runs cannot collide.
std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("gmlm_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string model_file() {
  static const std::string path = [] {
    const std::string p = (scratch_dir() / "model.json").string();
    const CliRun r = run({"model", "--n", "4", "--clique", "0", "--clique", "1", "--coupling",
                          "1.5", "--clique-field", "0.3", "--outside-field", "0.05", "--out", p});
    REQUIRE(r.code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("help and usage errors use the documented exit codes") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"estimate", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"model", "--bogus-flag"}).code == 2);
  const CliRun r = run({"model"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("model builds, checks premises and writes a loadable file") {
  const CliRun r = run({"model", "--n", "4", "--clique", "0", "--clique", "1", "--coupling",
                        "1.5", "--clique-field", "0.3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.contains("model"));
  CHECK(j["model"]["n"] == 4);

  const CliRun checked = run({"model", "--n", "6", "--clique", "0", "--clique", "1", "--clique",
                              "2", "--coupling", "8", "--clique-field", "0.2", "--check", "--k",
                              "4"});
  REQUIRE(checked.code == 0);
  const json cj = json::parse(checked.out);
  REQUIRE(cj.contains("checks"));
  CHECK(cj["checks"]["strongly_ferromagnetic"]["holds"] == true);

  const gmlm::IsingModel m = gmlm::model_from_json(gmlm::read_file(model_file()));
  CHECK(m.n == 4);
  REQUIRE(m.clique.has_value());
  CHECK(m.clique->members == std::vector<int>{0, 1});

  // Exact-enumeration capacity is 20 sites.
  CHECK(run({"model", "--n", "25", "--clique", "0", "--clique", "1", "--coupling", "1"}).code ==
        3);
}

TEST_CASE("estimate synthesizes, fits and reports the parameter error") {
  const CliRun r = run({"--seed", "3", "estimate", "--model", model_file(), "--synthesize",
                        "400", "--k", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["rows"] == 400);
  CHECK(j["fit"]["converged"] == true);
  CHECK(j["fit"]["grad_norm"].get<double>() <= 1e-7);
  CHECK(j["param_error_vs_model"].get<double>() > 0.0);
  CHECK(j["param_error_vs_model"].get<double>() < 2.0);

  // The same seed reproduces the same fit bit for bit.
  const CliRun again = run({"--seed", "3", "estimate", "--model", model_file(), "--synthesize",
                            "400", "--k", "2"});
  CHECK(again.out == r.out);

  CHECK(run({"estimate", "--model", model_file()}).code == 2);
  CHECK(run({"estimate", "--model", model_file(), "--synthesize", "10", "--data", "x.csv"})
            .code == 2);
  CHECK(run({"estimate", "--model", "no_such_file.json", "--synthesize", "10"}).code == 2);
}

TEST_CASE("estimate round-trips a dataset file") {
  const std::string data_path = (scratch_dir() / "rows.csv").string();
  const CliRun gen = run({"--seed", "9", "estimate", "--model", model_file(), "--synthesize",
                          "200", "--k", "2", "--save-data", data_path});
  REQUIRE(gen.code == 0);

  const CliRun refit = run({"estimate", "--model", model_file(), "--data", data_path, "--k",
                            "2"});
  REQUIRE(refit.code == 0);
  const json a = json::parse(gen.out);
  const json b = json::parse(refit.out);
  CHECK(a["fit"]["loss"] == b["fit"]["loss"]);
  CHECK(a["fit"]["theta"] == b["fit"]["theta"]);
}

TEST_CASE("asymptotics reports the equality, the trace curve and the bound") {
  const CliRun r = run({"asymptotics", "--model", model_file(), "--k", "2", "--monotone", "1",
                        "--monotone", "2", "--monotone", "3", "--monotone", "4",
                        "--variance-bound"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["information_equality"]["ok"] == true);
  CHECK(j["gamma_trace"].get<double>() >= j["inverse_fisher_trace"].get<double>() - 1e-9);
  const auto traces = j["monotonicity"]["traces"].get<std::vector<double>>();
  REQUIRE(traces.size() == 4);
  for (std::size_t i = 0; i + 1 < traces.size(); ++i) CHECK(traces[i] >= traces[i + 1] - 1e-10);
  CHECK(j["monotonicity"]["ok"] == true);
  CHECK(j["variance_bound"]["ok"] == true);
}

TEST_CASE("chain modes: spectra, exact hitting and simulated hitting") {
  const CliRun spec = run({"chain", "--model", model_file(), "--spectral", "--chain", "kgibbs",
                           "--k", "2"});
  REQUIRE(spec.code == 0);
  const json sj = json::parse(spec.out);
  CHECK(sj["spectrum"]["constant"].get<double>() >= 1.0);

  const CliRun hit = run({"chain", "--model", model_file(), "--target", "enter-plus", "--steps",
                          "5", "--exact", "--trials", "50", "--start", "all-minus"});
  REQUIRE(hit.code == 0);
  const json hj = json::parse(hit.out);
  const double from_start = hj["hitting"]["hit_probability_from_start"].get<double>();
  const double worst = hj["hitting"]["hit_probability_worst_start"].get<double>();
  CHECK(worst >= 0.0);
  CHECK(worst <= from_start + 1e-12);
  CHECK(from_start <= 1.0);
  CHECK(hj["hitting"]["hits"].get<int>() <= 50);
  // The simulated fraction agrees with the exact value loosely (50 trials).
  CHECK(std::abs(hj["hitting"]["hit_fraction"].get<double>() - from_start) < 0.35);

  CHECK(run({"chain", "--model", model_file()}).code == 2);
  CHECK(run({"chain", "--model", model_file(), "--spectral", "--chain", "weighted"}).code == 2);
}

TEST_CASE("figure validates its name and writes the sampler comparison files") {
  CHECK(run({"figure", "--name", "bogus", "--out-dir", scratch_dir().string()}).code == 2);
  CHECK(run({"figure", "--name", "sampling"}).code == 2);

  const std::string dir = (scratch_dir() / "fig").string();
  const CliRun r = run({"--jobs", "2", "figure", "--name", "sampling", "--out-dir", dir});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir + "/sampling.csv"));
  CHECK(std::filesystem::exists(dir + "/sampling_summary.json"));
  const json j = json::parse(gmlm::read_file(dir + "/sampling_summary.json"));
  REQUIRE(j.is_array());
  REQUIRE(!j.empty());
  CHECK(j[0].contains("chain"));
  CHECK(j[0].contains("hits"));
}

TEST_CASE("verify runs clean on small counts and rejects unknown suites") {
  const CliRun r = run({"verify", "--suite", "conditionals", "--suite", "modes", "--count", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("verification passed") != std::string::npos);
  CHECK(run({"verify", "--suite", "nonsense"}).code == 2);
}
