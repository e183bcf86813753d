// Copyright 2026 The upt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Integration tests that drive the installed CLI binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "upt/categorical.hpp"
#include "upt/csvio.hpp"
#include "upt/pmf.hpp"
#include "upt/sanitizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("upt_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run_cli(const std::string& args, const std::string& extra_env = "") {
  const std::string cmd =
      extra_env + (extra_env.empty() ? "" : " ") + UPT_CLI_PATH + " " + args +
      " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_outlier_pmf(const std::string& path, bool normalized) {
  json j;
  j["labels"] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::vector<double> probs{0.25, 0.25, 0.15, 0.1, 0.04, 0.005, 0.003, 0.002};
  if (normalized) {
    for (auto& v : probs) v /= 0.8;
  }
  j["probs"] = probs;
  std::ofstream(path) << j.dump(2);
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("tradeoff") == 2);           // missing required options
  CHECK(run_cli("no-such-command x") == 2);
}

TEST_CASE("cli: tradeoff curve matches the library") {
  TempDir tmp;
  write_outlier_pmf(tmp.file("pmf.json"), true);
  const std::string curve = tmp.file("curve.csv");
  CHECK(run_cli("tradeoff --pmf " + tmp.file("pmf.json") +
                " --grid 0.1,0.25,0.5 --out " + curve) == 0);

  std::ifstream in(curve);
  const auto rows = upt::csv::parse(in);
  REQUIRE(rows.size() == 4);  // header + 3 grid points
  CHECK(rows[0] == std::vector<std::string>{"D", "R", "E"});

  const upt::Pmf source(oracle::outlier_pmf());
  const double want[] = {0.1, 0.25, 0.5};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::stod(rows[i + 1][0]) == doctest::Approx(want[i]));
    CHECK(std::stod(rows[i + 1][2]) ==
          doctest::Approx(upt::categorical::gamma(source, want[i]))
              .epsilon(1e-9));
  }
}

TEST_CASE("cli: tradeoff refuses an out-of-range distortion with exit 3") {
  TempDir tmp;
  write_outlier_pmf(tmp.file("pmf.json"), true);
  const std::string cmd = std::string(UPT_CLI_PATH) + " tradeoff --pmf " +
                          tmp.file("pmf.json") + " --grid 0.9 --out " +
                          tmp.file("x.csv") + " 2> " + tmp.file("err.txt");
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
  const std::string err = read_file(tmp.file("err.txt"));
  CHECK(err.find("0.6875") != std::string::npos);  // reports D_max
  CHECK(!fs::exists(tmp.file("x.csv")));           // no partial output
}

TEST_CASE("cli: tradeoff --normalize accepts raw weights") {
  TempDir tmp;
  write_outlier_pmf(tmp.file("raw.json"), false);
  CHECK(run_cli("tradeoff --pmf " + tmp.file("raw.json") +
                " --grid 0.1 --out " + tmp.file("c.csv")) == 4);
  CHECK(run_cli("tradeoff --pmf " + tmp.file("raw.json") +
                " --normalize --grid 0.1 --out " + tmp.file("c.csv")) == 0);
}

TEST_CASE("cli: waterfilling channel export and sanitize determinism") {
  TempDir tmp;
  write_outlier_pmf(tmp.file("pmf.json"), true);
  CHECK(run_cli("tradeoff --pmf " + tmp.file("pmf.json") +
                " --at 0.25 --solution " + tmp.file("sol.json") +
                " --forward-channel " + tmp.file("fwd.csv") +
                " --test-channel " + tmp.file("test.csv")) == 0);

  const json sol = json::parse(read_file(tmp.file("sol.json")));
  CHECK(sol["D"].get<double>() == doctest::Approx(0.25));
  CHECK(sol["support"].size() == 4);

  // Synthesize a database, sanitize twice, byte-identical results.
  const upt::Pmf source(oracle::outlier_pmf(),
                        {"a", "b", "c", "d", "e", "f", "g", "h"});
  const auto db = upt::sanitizer::synth_database(source, "x", 5000, 12);
  std::ofstream(tmp.file("db.csv")) << db.to_csv_string();

  const std::string base = "sanitize --in " + tmp.file("db.csv") +
                           " --channel " + tmp.file("fwd.csv") +
                           " --seed 7 --public x";
  CHECK(run_cli(base + " --out " + tmp.file("s1.csv")) == 0);
  CHECK(run_cli(base + " --out " + tmp.file("s2.csv")) == 0);
  CHECK(read_file(tmp.file("s1.csv")) == read_file(tmp.file("s2.csv")));

  // Worker count does not change the bytes either.
  CHECK(run_cli(base + " --out " + tmp.file("s3.csv"), "UPT_THREADS=1") == 0);
  CHECK(read_file(tmp.file("s3.csv")) == read_file(tmp.file("s1.csv")));

  // Report carries the design equivocation.
  CHECK(run_cli(base + " --out " + tmp.file("s4.csv") + " --report " +
                tmp.file("rep.json") + " --target-d 0.25") == 0);
  const json rep = json::parse(read_file(tmp.file("rep.json")));
  CHECK(rep["n"].get<std::size_t>() == 5000);
  CHECK(rep["target_d"].get<double>() == doctest::Approx(0.25));
  CHECK(rep["empirical_d"].get<double>() > 0.1);
  CHECK(rep["empirical_d"].get<double>() < 0.4);
}

TEST_CASE("cli: fit reproduces frequencies") {
  TempDir tmp;
  std::ofstream(tmp.file("db.csv")) << "color\nred\nblue\nred\nred\n";
  CHECK(run_cli("fit --in " + tmp.file("db.csv") + " --cols color --out " +
                tmp.file("pmf.json")) == 0);
  const json j = json::parse(read_file(tmp.file("pmf.json")));
  CHECK(j["labels"] == json::array({"blue", "red"}));
  CHECK(j["probs"][0].get<double>() == doctest::Approx(0.25));
  CHECK(j["probs"][1].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("cli: gaussian leakage identical across si/uninformed") {
  TempDir tmp;
  CHECK(run_cli("gaussian --varx 1 --rhoxy2 0.5 --case uninformed "
                "--grid 0.05:0.25:5 --out " +
                tmp.file("u.csv")) == 0);
  CHECK(run_cli("gaussian --varx 1 --rhoxy2 0.5 --rhoxz2 0.75 --case si "
                "--grid 0.05:0.25:5 --out " +
                tmp.file("s.csv")) == 0);
  std::ifstream fu(tmp.file("u.csv")), fsi(tmp.file("s.csv"));
  const auto ru = upt::csv::parse(fu);
  const auto rs = upt::csv::parse(fsi);
  REQUIRE(ru.size() == rs.size());
  CHECK(ru[0] == std::vector<std::string>{"D", "R", "L", "case"});
  for (std::size_t i = 1; i < ru.size(); ++i) {
    CHECK(ru[i][3] == "uninformed");
    CHECK(rs[i][3] == "si");
    CHECK(ru[i][2] == rs[i][2]);  // identical leakage column, textually
  }
}

TEST_CASE("cli: solve emits a solution JSON") {
  TempDir tmp;
  json prob;
  prob["joint"] = {{"axes", json::array({{{"name", "x"}, {"size", 2}},
                                         {{"name", "xr"}, {"size", 2}}})},
                   {"table", json::array({json::array({0.5, 0.0}),
                                          json::array({0.0, 0.5})})},
                   {"public", json::array({"xr"})},
                   {"private", json::array({"x"})}};
  prob["target_d"] = 0.11;
  std::ofstream(tmp.file("prob.json")) << prob.dump(2);

  CHECK(run_cli("solve --problem " + tmp.file("prob.json") +
                " --objective max_equivocation --out " + tmp.file("sol.json") +
                " --channel-out " + tmp.file("ch.csv")) == 0);
  const json sol = json::parse(read_file(tmp.file("sol.json")));
  CHECK(sol["equivocation"].get<double>() ==
        doctest::Approx(oracle::h2(0.11)).epsilon(1e-4));
  CHECK(sol["final_gap"].get<double>() <= 1e-6);
  CHECK(fs::exists(tmp.file("ch.csv")));
}

TEST_CASE("cli: data errors exit 4, caps exit 5") {
  TempDir tmp;
  CHECK(run_cli("tradeoff --pmf " + tmp.file("missing.json") +
                " --grid 0.1 --out " + tmp.file("c.csv")) == 4);

  // A simulate config whose codebook blows the cap.
  json cfg;
  cfg["source"] = {{"axes", json::array({{{"name", "x"}, {"size", 2}}})},
                   {"table", json::array({0.5, 0.5})},
                   {"public", json::array({"x"})},
                   {"private", json::array({"x"})}};
  cfg["aux"] = json::array({json::array({1.0, 0.0}),
                            json::array({0.0, 1.0})});
  cfg["trials"] = 5;
  cfg["blocklengths"] = json::array({40});
  std::ofstream(tmp.file("sim.json")) << cfg.dump(2);
  CHECK(run_cli("simulate --config " + tmp.file("sim.json") + " --out " +
                tmp.file("sum.json")) == 5);
}

TEST_CASE("cli: simulate writes per-blocklength rows") {
  TempDir tmp;
  json cfg;
  cfg["source"] = {
      {"axes", json::array({{{"name", "x"}, {"labels", {"0", "1"}}},
                            {{"name", "z"}, {"labels", {"0", "1"}}}})},
      {"table", json::array({json::array({0.45, 0.05}),
                             json::array({0.05, 0.45})})},
      {"public", json::array({"x", "z"})},
      {"private", json::array({"x"})}};
  cfg["z"] = "z";
  cfg["aux"] = json::array({json::array({0.75, 0.25}),
                            json::array({0.25, 0.75})});
  cfg["trials"] = 60;
  cfg["seed"] = 5;
  cfg["rate_margin"] = 0.1;
  cfg["typicality_delta"] = 0.12;
  std::ofstream(tmp.file("sim.json")) << cfg.dump(2);

  CHECK(run_cli("simulate --config " + tmp.file("sim.json") +
                " --blocklengths 6,8 --out " + tmp.file("sum.json")) == 0);
  const json sum = json::parse(read_file(tmp.file("sum.json")));
  REQUIRE(sum["results"].size() == 2);
  CHECK(sum["results"][0]["n"].get<int>() == 6);
  CHECK(sum["results"][1]["n"].get<int>() == 8);
  CHECK(sum["results"][1]["M"].get<int>() >= 1);
}
