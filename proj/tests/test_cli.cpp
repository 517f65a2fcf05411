//------------------------------------------------------------------------------
//
//   Copyright 2026 The entbound Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "entbound/cli.hpp"
#include "entbound/errors.hpp"

using namespace entbound;

namespace {

struct Result
{
  int         code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "entbound");
  std::ostringstream out;
  std::ostringstream err;
  int const          code = cli::run(args, out, err);
  return Result{code, out.str(), err.str()};
}

std::filesystem::path temp_file(std::string const &name, std::string const &content = {})
{
  auto const path = std::filesystem::temp_directory_path() / ("entbound_test_" + name);
  if (!content.empty())
  {
    std::ofstream(path) << content;
  }
  return path;
}

}  // namespace

TEST_CASE("model spec grammar")
{
  CHECK(cli::parse_model_spec("poisson:1.5").name() == "poisson:1.5");
  CHECK(cli::parse_model_spec("geometric:0.25").name() == "geometric:0.25");
  CHECK(cli::parse_model_spec("negbinomial:2,0.3").name() == "negbinomial:2,0.3");
  CHECK(cli::parse_model_spec("zeta:2").name() == "zeta:2");
  CHECK(cli::parse_model_spec("tabulated:" ENTBOUND_TEST_DATA "/complete.json").name() == "tabulated[5]");

  for (char const *bad : {"poisson", "poisson:", "poisson:abc", "poisson:1,2", "zeta:1", "cauchy:1",
                          "negbinomial:2", "geometric:1.5", "tabulated:"})
  {
    CAPTURE(bad);
    CHECK_THROWS_AS(cli::parse_model_spec(bad), ParseError);
  }
  try
  {
    cli::parse_model_spec("poisson:abc");
  }
  catch (ParseError const &e)
  {
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
}

TEST_CASE("certify command")
{
  auto const text = run_cli({"certify", "zeta:2", "--r", "0.25", "--slack", "0.01"});
  CHECK(text.code == cli::kOk);
  CHECK(text.out.find("14784") != std::string::npos);
  CHECK(text.out.find("powerlaw") != std::string::npos);

  auto const json = run_cli({"certify", "geometric:0.5", "--r", "0.5", "--format", "json"});
  REQUIRE(json.code == cli::kOk);
  auto const doc = nlohmann::json::parse(json.out);
  CHECK(doc["C_r"].get<double>() >= 2.414213562373095);
  CHECK(doc["provenance"] == "ratio");

  auto const csv = run_cli({"certify", "poisson:1", "--format", "csv"});
  CHECK(csv.code == cli::kOk);
  CHECK(csv.out.rfind("model,r,C_r,slack,truncation_index,provenance,admissible\n", 0) == 0);

  auto const best = run_cli({"certify", "geometric:0.5", "--optimize-for", "0.4", "--format", "json"});
  CHECK(best.code == cli::kOk);
}

TEST_CASE("exit codes")
{
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"certify", "zeta:2", "--r", "0.5"}).code == cli::kInadmissibleR);
  CHECK(run_cli({"certify", "zeta:2", "--r", "0.25", "--slack", "1e-12"}).code == cli::kResourceLimit);
  CHECK(run_cli({"certify", "tabulated:" ENTBOUND_TEST_DATA "/complete.json"}).code ==
        cli::kMissingCertificate);
  CHECK(run_cli({"certify", "poisson:-1"}).code == cli::kUsage);
  CHECK(run_cli({"certify", "zeta:2", "--format", "xml"}).code == cli::kUsage);
  CHECK(run_cli({"bound", "zeta:2", "--n", "0", "--eps", "0.5"}).code == cli::kUsage);
  CHECK(run_cli({"samplesize", "zeta:2", "--eps", "0.5", "--delta", "3"}).code == cli::kUsage);
  CHECK(run_cli({"simulate", "geometric:0.5", "--eps", "0.4", "--replicates", "10"}).code == cli::kUsage);
  CHECK(run_cli({"simulate", "geometric:0.5", "--eps", "0.4", "--replicates", "200",
                 "--entropy-tol", "0.1"}).code == cli::kUsage);
  auto const inadmissible = run_cli({"certify", "zeta:2", "--r", "0.7"});
  CHECK(inadmissible.err.find("admissible interval is (0, 0.5)") != std::string::npos);
  CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("bound and samplesize commands")
{
  auto const bound = run_cli({"bound", "geometric:0.5", "--r", "0.5", "--n", "200", "--eps", "0.4",
                              "--format", "json"});
  REQUIRE(bound.code == cli::kOk);
  auto const doc = nlohmann::json::parse(bound.out);
  CHECK(doc["bound"].get<double>() == doctest::Approx(0.15450175759674626).epsilon(1e-5));
  CHECK(doc["vacuous"] == false);

  auto const cert_path = temp_file("cert.json");
  REQUIRE(run_cli({"certify", "zeta:3", "--format", "json", "--out", cert_path.string()}).code ==
          cli::kOk);
  auto const from_cert = run_cli({"samplesize", "--cert", cert_path.string(), "--eps", "0.5",
                                  "--delta", "0.05", "--format", "json"});
  REQUIRE(from_cert.code == cli::kOk);
  auto const direct = run_cli({"samplesize", "zeta:3", "--eps", "0.5", "--delta", "0.05",
                               "--format", "json"});
  CHECK(nlohmann::json::parse(from_cert.out)["n"] == nlohmann::json::parse(direct.out)["n"]);
  std::filesystem::remove(cert_path);

  CHECK(run_cli({"bound", "--cert", "/nonexistent.json", "--n", "5", "--eps", "1"}).code ==
        cli::kUsage);
}

TEST_CASE("simulate output is deterministic")
{
  std::vector<std::string> const args{"simulate", "geometric:0.5", "--n", "50", "--eps", "0.3,0.6",
                                      "--replicates", "500", "--seed", "11", "--format", "csv"};
  auto const a = run_cli(args);
  auto const b = run_cli(args);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run_cli(threaded).out == a.out);

  auto const text = run_cli({"simulate", "geometric:0.5", "--n", "50", "--eps", "0.3",
                             "--replicates", "200", "--seed", "11"});
  CHECK(text.out.find("seed=11") != std::string::npos);
  CHECK(text.out.find("slack=") != std::string::npos);
  CHECK(text.out.find("entropy_tol=0.003") != std::string::npos);
}

TEST_CASE("simulate from a config file")
{
  auto const cfg = temp_file("sim.json", R"({"model": "poisson:1", "n": 40, "eps": [0.5],
                                             "replicates": 300, "seed": 4})");
  auto const a   = run_cli({"simulate", "--config", cfg.string(), "--format", "csv"});
  auto const b   = run_cli({"simulate", "poisson:1", "--n", "40", "--eps", "0.5", "--replicates",
                            "300", "--seed", "4", "--format", "csv"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  // Flags override the file.
  auto const c = run_cli({"simulate", "--config", cfg.string(), "--seed", "5", "--format", "csv"});
  CHECK(c.out != a.out);
  std::filesystem::remove(cfg);

  auto const broken = temp_file("broken.json", "{not json");
  CHECK(run_cli({"simulate", "--config", broken.string()}).code == cli::kUsage);
  std::filesystem::remove(broken);
}

TEST_CASE("sweep command")
{
  auto const res = run_cli({"sweep", "geometric:0.5", "poisson:1", "--n", "30", "--eps", "0.5",
                            "--replicates", "200", "--seed", "1", "--format", "json"});
  REQUIRE(res.code == cli::kOk);
  auto const doc = nlohmann::json::parse(res.out);
  REQUIRE(doc.size() == 2);
  CHECK(doc[0]["model"] == "geometric:0.5");
  CHECK(doc[1]["model"] == "poisson:1");
  CHECK(doc[0]["seed"] != doc[1]["seed"]);

  auto const cfg = temp_file("sweep.json", R"([{"model": "geometric:0.5", "eps": 0.5},
                                               {"model": "zeta:2", "eps": 0.5, "r": 0.6}])");
  auto const aborted = run_cli({"sweep", "--config", cfg.string(), "--replicates", "200", "--n", "20",
                                "--format", "csv"});
  CHECK(aborted.code == cli::kInadmissibleR);
  // The finished config is still reported.
  CHECK(aborted.out.find("geometric:0.5,20,200,") != std::string::npos);
  CHECK(aborted.err.find("sweep aborted at config 1") != std::string::npos);
  std::filesystem::remove(cfg);
}
