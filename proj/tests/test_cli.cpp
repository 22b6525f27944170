// Copyright 2026 The sbb Authors.
//
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
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sbb/sbb.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory per test case.
fs::path workdir(const std::string& name) {
  const fs::path d = fs::path(SBB_TEST_WORK_DIR) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Run cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.string() + "' && env -u SBB_OUTPUT_DIR " + env + " '" +
                          SBB_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

double number_after(const std::string& text, const std::string& prefix) {
  const auto pos = text.find(prefix);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + prefix.size()));
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void check_csv(const fs::path& p, const std::string& header) {
  REQUIRE(fs::exists(p));
  const auto text = slurp(p);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(lines(text).front() == header);
}

const double kW = 2 * 3.14159265358979323846 * 20;

}  // namespace

TEST_CASE("design prints the minimal time and writes both files") {
  const auto d = workdir("design_bb");
  const auto r = cli(d, "design --kind bang-bang --samples 201");
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "t_f = ") == doctest::Approx(50.33).epsilon(0.1 / 50.3));
  check_csv(d / "protocol.csv", "t,u,qc,q0,qc_dot");
  CHECK(lines(slurp(d / "protocol.csv")).size() == 202);
  const auto doc = json::parse(slurp(d / "protocol.json"));
  CHECK(doc.at("version") == 1);
  CHECK(doc.at("kind") == "BangBang");
}

TEST_CASE("design of the accelerating case lists ten switching times") {
  const auto d = workdir("design_acc");
  const auto r = cli(d, "design --epsilon-ratio 0.1 --zeta-ratio 0.5");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("switching times (10)") != std::string::npos);
  CHECK(number_after(r.out, "t_f = ") == doctest::Approx(60.5).epsilon(0.1 / 60.5));

  const auto w = cli(d, "design --epsilon-ratio 0.5 --zeta-ratio 2 --name degenerate");
  CHECK(w.code == 0);
  CHECK(number_after(w.out, "t_f = ") == doctest::Approx(53.9).epsilon(0.1 / 53.9));
  CHECK((w.out + w.err).find("degenerate") != std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  const auto d = workdir("input_errors");
  auto r = cli(d, "design --delta-ratio 0");
  CHECK(r.code == 2);
  CHECK(r.err.find("delta") != std::string::npos);
  CHECK(cli(d, "design --kind spline").code == 2);
  CHECK(cli(d, "design --zeta-ratio 0.5").code == 2);
  CHECK(cli(d, "frobnicate").code == 2);
  CHECK(cli(d, "design --samples nope").code == 2);
  CHECK(cli(d, "design --config missing.json").code == 2);
  std::ofstream(d / "bad.json") << "{oops";
  CHECK(cli(d, "design --config bad.json").code == 2);
}

TEST_CASE("verify exit codes") {
  const auto d = workdir("verify");
  REQUIRE(cli(d, "design --epsilon-ratio 0.1 --zeta-ratio 0.5 --name acc").code == 0);
  auto r = cli(d, "verify acc.json");
  CHECK(r.code == 0);
  const auto m = json::parse(slurp(d / "acc.metrics.json"));
  CHECK(m.at("passed") == true);

  auto doc = json::parse(slurp(d / "acc.json"));
  doc["t_f"] = doc["t_f"].get<double>() / 2;
  std::ofstream(d / "half.json") << doc.dump();
  CHECK(cli(d, "verify half.json").code == 3);

  std::ofstream(d / "broken.json") << "{\"version\": 1, \"kind\": ";
  CHECK(cli(d, "verify broken.json").code == 2);
  CHECK(cli(d, "verify nowhere.json").code == 2);
}

TEST_CASE("design output re-verifies to the in-process metrics") {
  const auto d = workdir("roundtrip");
  REQUIRE(cli(d, "design --epsilon-ratio 0.2 --zeta-ratio 1 --name p").code == 0);
  REQUIRE(cli(d, "verify p.json --output m.json").code == 0);
  const auto m = json::parse(slurp(d / "m.json"));

  const auto s = sbb_default_spec(kW, 0.01);
  const auto c = sbb_constraints_from_ratios(&s, 0.1, 1, 0.2, 1, 1.0);
  sbb_protocol* p = nullptr;
  REQUIRE(sbb_design(&s, &c, &p) == SBB_OK);
  sbb_metrics* ref = nullptr;
  REQUIRE(sbb_verify(p, 0, 0, &ref) == SBB_OK);
  char* text = nullptr;
  REQUIRE(sbb_metrics_to_json(ref, &text) == SBB_OK);
  const auto r = json::parse(text);
  sbb_string_free(text);
  sbb_metrics_free(ref);
  sbb_protocol_free(p);

  for (const char* key : {"avg_potential_energy", "sloshing_amplitude", "final_excess_energy",
                          "final_position", "final_velocity"}) {
    CAPTURE(key);
    const double a = m.at(key).get<double>(), b = r.at(key).get<double>();
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)));
  }
}

TEST_CASE("config file with flag override") {
  const auto d = workdir("config");
  std::ofstream(d / "run.json") << R"({"delta_ratio": 0.1, "epsilon-ratio": 0.1, "kind": "vel-bounded"})";
  auto r = cli(d, "design --config run.json");
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "t_f = ") == doctest::Approx(58.9).epsilon(0.1 / 58.9));
  r = cli(d, "design --config run.json --epsilon-ratio 0.05");
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "t_f = ") == doctest::Approx(68.7).epsilon(0.1 / 68.7));
}

TEST_CASE("output directory precedence") {
  const auto d = workdir("outdir");
  std::ofstream(d / "run.json") << R"({"output_dir": "from_config"})";
  REQUIRE(cli(d, "design --config run.json").code == 0);
  CHECK(fs::exists(d / "from_config" / "protocol.json"));
  REQUIRE(cli(d, "design --config run.json", "SBB_OUTPUT_DIR=from_env").code == 0);
  CHECK(fs::exists(d / "from_env" / "protocol.json"));
  REQUIRE(cli(d, "design --config run.json --output-dir from_flag", "SBB_OUTPUT_DIR=from_env").code == 0);
  CHECK(fs::exists(d / "from_flag" / "protocol.json"));
}

TEST_CASE("ratios win over SI values") {
  const auto d = workdir("ratio_vs_si");
  const auto r = cli(d, "design --kind bang-bang --delta 0.002 --delta-ratio 0.1");
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "t_f = ") == doctest::Approx(50.33).epsilon(0.1 / 50.3));
  CHECK(!r.err.empty());
  const auto si = cli(d, "design --kind bang-bang --delta 0.001");
  REQUIRE(si.code == 0);
  CHECK(number_after(si.out, "t_f = ") == doctest::Approx(50.33).epsilon(0.1 / 50.3));
}

TEST_CASE("shoot") {
  const auto d = workdir("shoot");
  auto r = cli(d, "shoot --epsilon-ratio 0.1 --zeta-ratio 0.5");
  REQUIRE(r.code == 0);
  const int it = static_cast<int>(number_after(r.out, "converged after "));
  CHECK(it >= 10);
  CHECK(it <= 20);
  check_csv(d / "shooting_history.csv", "epoch,residual_norm,t1,t2,t3,t4,t5,t6,t7,t8,t9,t10,t_f");
  CHECK(lines(slurp(d / "shooting_history.csv")).size() == static_cast<std::size_t>(it) + 2);
  CHECK(cli(d, "verify shooting.json").code == 3);  // default tol leaves ~3e-5 d at t_f
  r = cli(d, "shoot --epsilon-ratio 0.1 --zeta-ratio 0.5 --tol 1e-10 --name tight");
  REQUIRE(r.code == 0);
  CHECK(cli(d, "verify tight.json").code == 0);

  const auto s = sbb_default_spec(kW, 0.01);
  const auto c = sbb_constraints_from_ratios(&s, 0.1, 1, 0.1, 1, 0.5);
  sbb_protocol* p = nullptr;
  REQUIRE(sbb_design(&s, &c, &p) == SBB_OK);
  double t[10];
  std::size_t n = 0;
  REQUIRE(sbb_protocol_switch_times(p, t, 10, &n) == SBB_OK);
  std::ostringstream guess;
  guess.precision(17);
  for (double v : t) guess << v * 1e3 << ",";
  guess << sbb_protocol_t_f(p) * 1e3;
  sbb_protocol_free(p);
  r = cli(d, "shoot --epsilon-ratio 0.1 --zeta-ratio 0.5 --guess-ms " + guess.str());
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "converged after ") <= 1);

  CHECK(cli(d, "shoot --epsilon-ratio 0.1 --zeta-ratio 0.5 --rho 1.5").code == 2);
  CHECK(cli(d, "shoot --epsilon-ratio 0.1").code == 2);
  CHECK(cli(d, "shoot --epsilon-ratio 0.1 --zeta-ratio 0.5 --max-iter 3").code == 4);
}

TEST_CASE("sweep of near-minimal times") {
  const auto d = workdir("sweep");
  REQUIRE(cli(d, "sweep --zeta-ratios 0.8 --epsilon-ratios 0.1").code == 0);
  check_csv(d / "sweep.csv", "epsilon_ratio,zeta_ratio,t_f_ms,regime_valid");
  auto rows = lines(slurp(d / "sweep.csv"));
  REQUIRE(rows.size() == 2);
  const auto s = sbb_default_spec(kW, 0.01);
  auto c = sbb_constraints_from_ratios(&s, 0.1, 1, 0.1, 1, 0.8);
  double t_f = 0.0;
  REQUIRE(sbb_near_minimal_time(&s, &c, &t_f) == SBB_OK);
  const double col = std::stod(rows[1].substr(rows[1].find(",0.8,") + 5));
  CHECK(col == doctest::Approx(t_f * 1e3).epsilon(1e-12));

  // a very loose velocity bound leaves the displacement-only time plus epsilon/zeta
  REQUIRE(cli(d, "sweep --zeta-ratios 0.8 --epsilon-ratios 1e4 --name loose").code == 0);
  rows = lines(slurp(d / "loose.csv"));
  REQUIRE(rows.size() == 2);
  const double loose = std::stod(rows[1].substr(rows[1].find(",0.8,") + 5)) * 1e-3;
  c = sbb_constraints_from_ratios(&s, 0.1, 0, 0.0, 0, 0.0);
  double bb = 0.0;
  REQUIRE(sbb_near_minimal_time(&s, &c, &bb) == SBB_OK);
  CHECK(loose == doctest::Approx(bb + 1e4 / (0.8 * kW)).epsilon(1e-4));

  REQUIRE(cli(d, "sweep --epsilon-ratios 0.02:0.4:5 --zeta-ratios 0.8,1.2,1.6 --name grid").code == 0);
  CHECK(lines(slurp(d / "grid.csv")).size() == 16);
  CHECK(cli(d, "sweep --epsilon-ratios 0.4:0.1:3 --name down").code == 0);
  CHECK(cli(d, "sweep --epsilon-ratios 0.1:0.4:0").code == 2);
  CHECK(cli(d, "sweep --epsilon-ratios a,b").code == 2);
  CHECK(cli(d, "sweep --epsilon-ratios=-0.1").code == 2);
  CHECK(cli(d, "sweep --mode bogus").code == 2);
}

TEST_CASE("energy sweep: smooth protocols excite less than the polynomial") {
  const auto d = workdir("sweep_energy");
  REQUIRE(cli(d, "sweep --mode energy --epsilon-ratios 0.05:0.4:8 --zeta-ratios 0.8,1.2,1.6").code == 0);
  check_csv(d / "sweep.csv",
            "epsilon_ratio,zeta_ratio,t_f_ms,ep_smooth_J,ep_polynomial_J,slosh_smooth_m,"
            "slosh_polynomial_m,regime_valid");
  const auto rows = lines(slurp(d / "sweep.csv"));
  REQUIRE(rows.size() == 25);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<double> v;
    std::istringstream in(rows[i]);
    for (std::string cell; std::getline(in, cell, ',');) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 8);
    CAPTURE(rows[i]);
    CHECK(v[3] < v[4]);
  }
}

TEST_CASE("optimize") {
  const auto d = workdir("optimize");
  auto r = cli(d, "optimize --t-f-ms 60");
  REQUIRE(r.code == 0);
  CHECK(number_after(r.out, "ratio = ") == doctest::Approx(1.0002).epsilon(0.01));
  check_csv(d / "optimized_controller.csv", "t,u");
  CHECK(lines(slurp(d / "optimized_controller.csv")).size() == 101);
  CHECK(cli(d, "optimize --t-f-ms 40").code == 4);
  CHECK(cli(d, "optimize").code == 2);
  CHECK(cli(d, "optimize --t-f-ms 60 --nodes 1").code == 2);
}

TEST_CASE("numbers ignore the process locale") {
  const auto d = workdir("locale");
  REQUIRE(cli(d, "design --kind bang-bang --samples 11", "LC_ALL=de_DE.UTF-8 LANG=de_DE.UTF-8").code == 0);
  const auto rows = lines(slurp(d / "protocol.csv"));
  REQUIRE(rows.size() == 12);
  CHECK(std::count(rows[5].begin(), rows[5].end(), ',') == 4);
  CHECK(rows[5].find('.') != std::string::npos);
}
