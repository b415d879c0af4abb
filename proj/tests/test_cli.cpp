// Copyright 2026 The capax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "capax/error.hpp"
#include "cli.hpp"

using namespace capax;
using nlohmann::json;

namespace {

const std::string kData = CAPAX_TEST_DATA;
const std::string kTmp = CAPAX_TEST_TMPDIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "capax");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

}  // namespace

TEST_CASE("cap on the identity channel") {
  const Run r = run({"cap", kData + "/identity2.json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(j["method"] == "DirectPD");
  for (const char* m : {"psi", "scaling", "all"}) {
    const Run o = run({"cap", kData + "/identity2.json", "--method", m});
    REQUIRE(o.code == 0);
    CHECK(json::parse(o.out)["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("cap0 and scale verbs") {
  const Run c0 = run({"cap0", kData + "/trace22.json"});
  REQUIRE(c0.code == 0);
  CHECK(json::parse(c0.out)["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  const Run sc = run({"scale", kData + "/trace22.json", "--max-steps", "500"});
  REQUIRE(sc.code == 0);
  CHECK(json::parse(sc.out)["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("coeffs on the trace channel") {
  const Run r = run({"coeffs", kData + "/trace22.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "j_1,j_2,d\n0,2,1\n1,1,2\n2,0,1\n");
  const std::string path = kTmp + "/coeffs.csv";
  const Run f = run({"coeffs", kData + "/trace22.json", "--method", "cb", "-o", path});
  REQUIRE(f.code == 0);
  CHECK(f.out.empty());
  CHECK(slurp(path) == "j_1,j_2,d\n0,2,1\n1,1,2\n2,0,1\n");
  const Run all = run({"coeffs", kData + "/trace22.json", "--method", "all"});
  REQUIRE(all.code == 0);
  CHECK(all.out.rfind("j_1,j_2,leibniz,cauchy_binet,interpolate\n", 0) == 0);
}

TEST_CASE("psi and entropy verbs") {
  const Run ex = run({"psi", kData + "/exterior.json"});
  REQUIRE(ex.code == 0);
  const json j = json::parse(ex.out);
  CHECK(j["value"] == 0.0);
  CHECK(j["classification"] == "ExteriorZero");
  const Run en = run({"entropy", kData + "/trace_problem.json", "--theta", "0,0"});
  REQUIRE(en.code == 0);
  CHECK(json::parse(en.out)["value"].get<double>() == doctest::Approx(std::log(4.0)));
  const Run bad = run({"entropy", kData + "/trace_problem.json", "--theta", "0,0,0"});
  CHECK(bad.code == 2);
  const Run outside = run({"entropy", kData + "/trace_problem.json", "--theta", "3,-3"});
  CHECK(outside.code == 1);
  CHECK(outside.err.find("InfeasibleMoment") != std::string::npos);
}

TEST_CASE("probe is seeded and deterministic") {
  const Run missing = run({"probe", kData + "/random22.json"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("ConfigError") != std::string::npos);
  const std::vector<std::string> args{"probe", kData + "/random22.json", "--seed", "7",
                                      "--scales-to", "8"};
  const Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("scale,dist,dcap\n", 0) == 0);
  CHECK(a.out.find("# alpha=") != std::string::npos);
}

TEST_CASE("exit codes and error names") {
  const Run unknown = run({"cap", kData + "/identity2.json", "--tolr", "1e-8"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("ConfigError") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"cap", kData + "/identity2.json", "--method", "magic"}).code == 2);
  const Run parse = run({"cap", kData + "/malformed.json"});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("ParseError") != std::string::npos);
  CHECK(parse.out.empty());
  const Run io = run({"cap", kData + "/does-not-exist.json"});
  CHECK(io.code == 1);
  CHECK(io.err.find("IoError") != std::string::npos);
}

TEST_CASE("every verb documents its flags") {
  for (const char* verb : {"cap", "cap0", "coeffs", "psi", "entropy", "scale", "probe"}) {
    const Run h = run({verb, "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("--config") != std::string::npos);
  }
  CHECK(run({"probe", "--help"}).out.find("--seed") != std::string::npos);
  CHECK(run({"cap", "--help"}).out.find("--method") != std::string::npos);
}

TEST_CASE("config precedence") {
  const cli::Config d = cli::config_load(std::nullopt, json::object());
  CHECK(d.tol == 1e-10);
  CHECK(d.restarts == 8);
  CHECK(d.scales_from == 2);
  CHECK(d.scales_to == 12);
  CHECK(!d.seed.has_value());

  const std::string path = kTmp + "/config.json";
  write(path, R"({"tol": 1e-6, "restarts": 3})");
  const cli::Config file = cli::config_load(path, json::object());
  CHECK(file.tol == 1e-6);
  CHECK(file.restarts == 3);
  const cli::Config both = cli::config_load(path, json{{"tol", 1e-8}});
  CHECK(both.tol == 1e-8);
  CHECK(both.restarts == 3);

  write(path, R"({"tolr": 1e-6})");
  try {
    cli::config_load(path, json::object());
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
  const Run viaflag = run({"cap", kData + "/identity2.json", "--config", path});
  CHECK(viaflag.code == 2);
  write(path, R"({"tol": "small"})");
  CHECK_THROWS_AS(cli::config_load(path, json::object()), Error);
}

TEST_CASE("inputs are not modified") {
  const std::string before = slurp(kData + "/trace22.json");
  run({"cap", kData + "/trace22.json", "--method", "all"});
  CHECK(slurp(kData + "/trace22.json") == before);
}
