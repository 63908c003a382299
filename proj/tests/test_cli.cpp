#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "psifde/config.hpp"
#include "psifde/monotone.hpp"
#include "psifde/run.hpp"
#include "test_problems.hpp"

using psifde::cli::ConfigError;
using psifde::cli::RunConfig;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("psifde_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

nlohmann::json example6_json() {
  return nlohmann::json::parse(psifde::cli::preset_json("example6"));
}

}  // namespace

TEST_CASE("example6 preset loads with the expected fields", "[cli]") {
  const RunConfig cfg = psifde::cli::load_preset("example6");
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.M == 0.0);
  CHECK(cfg.r == 0.5);
  CHECK(cfg.T == 1.0);
  CHECK(cfg.psi_expr == "t");
  CHECK(cfg.gamma() == 1.0);
  CHECK(cfg.Ltilde.value() == Catch::Approx(0.24));
  CHECK(cfg.mode == "picard");
  CHECK(cfg.seed == 42);
  CHECK(psifde::cli::preset_names() == std::vector<std::string>{"example6"});
  CHECK_THROWS_AS(psifde::cli::preset_json("nope"), ConfigError);
}

TEST_CASE("config validation names the offending field", "[cli]") {
  auto expect_field = [](nlohmann::json j, const std::string& field) {
    try {
      psifde::cli::parse_config(j);
      FAIL("expected rejection for " + field);
    } catch (const ConfigError& e) {
      CHECK(e.field == field);
    }
  };

  auto j = example6_json();
  j["problem"]["r"] = 1.2;  // bound is 1 when M = 0
  expect_field(j, "problem.r");

  j = example6_json();
  j["problem"]["beta"] = 1.5;
  expect_field(j, "problem.beta");

  j = example6_json();
  j["problem"].erase("f_expr");
  expect_field(j, "problem.f_expr");

  j = example6_json();
  j["solver"]["mode"] = "newton";
  expect_field(j, "solver.mode");

  j = example6_json();
  j["solver"].erase("Ltilde");
  expect_field(j, "solver.Ltilde");

  j = example6_json();
  j["problem"].erase("lower_expr");
  expect_field(j, "problem.lower_expr");

  j = example6_json();
  j["problem"]["psi_expr"] = "t + y";
  expect_field(j, "problem.psi_expr");

  j = example6_json();
  j["problem"]["psi_expr"] = "1 - t";  // decreasing
  expect_field(j, "problem.psi_expr");

  j = example6_json();
  j["problem"]["f_expr"] = "sin(";
  expect_field(j, "problem.f_expr");

  j = example6_json();
  j["solver"]["mode"] = "linear-bvp";
  j["problem"]["f_expr"] = "y + 1";  // linear modes take a pure g(t)
  expect_field(j, "problem.f_expr");

  j = example6_json();
  j["schema_version"] = 99;
  expect_field(j, "schema_version");
}

TEST_CASE("load_config reads files and reports missing ones", "[cli]") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  std::ofstream(cfg_path) << psifde::cli::preset_json("example6");
  const RunConfig cfg = psifde::cli::load_config(cfg_path);
  CHECK(cfg.alpha == 0.5);
  CHECK_THROWS_AS(psifde::cli::load_config(tmp.path / "missing.json"), ConfigError);
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(psifde::cli::load_config(bad), ConfigError);
}

TEST_CASE("linear-bvp run with zero forcing writes zeros", "[cli]") {
  TempDir tmp;
  RunConfig cfg = psifde::cli::load_preset("example6");
  cfg.mode = "linear-bvp";
  cfg.f_expr = "0";
  cfg.N = 32;
  cfg.out_path = (tmp.path / "out").string();
  REQUIRE(psifde::cli::run(cfg) == 0);

  const std::string csv = slurp(tmp.path / "out" / "solution.csv");
  CHECK(csv.find("\r\n") != std::string::npos);  // RFC 4180 line endings
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.substr(0, 5) == "t,v,y");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line == "\r") continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == 0.0);
    ++rows;
  }
  CHECK(rows == 33);

  const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "summary.json"));
  CHECK(summary.at("lambda0").get<double>() == 0.0);
  CHECK(summary.at("schema_version").get<int>() == 1);
}

TEST_CASE("picard run on example6 emits a dominated error column", "[cli]") {
  TempDir tmp;
  RunConfig cfg = psifde::cli::load_preset("example6");
  cfg.N = 64;
  cfg.tol = 1e-16;
  cfg.max_iter = 5;
  cfg.out_path = (tmp.path / "out").string();
  REQUIRE(psifde::cli::run(cfg) == 0);

  const std::string csv = slurp(tmp.path / "out" / "iterations.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.substr(0, header.find('\r')) == "n,step,gap_or_error,bound");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::string n, step, err, bound;
    std::getline(fields, n, ',');
    std::getline(fields, step, ',');
    std::getline(fields, err, ',');
    std::getline(fields, bound, ',');
    const double e = std::stod(err);
    const double b = std::stod(bound);
    CHECK(e <= b + 5e-2);  // coarse mesh slack
    ++rows;
  }
  CHECK(rows == 5);

  const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "summary.json"));
  CHECK(summary.at("constants").at("Omega").get<double>() ==
        Catch::Approx(problems::omega6).epsilon(1e-12));
  CHECK(summary.at("constants").at("rho").get<double>() ==
        Catch::Approx(problems::rho6).epsilon(1e-12));
  CHECK(summary.at("constants").at("contraction_ok").get<bool>());
  CHECK(summary.at("certificates").at("lower_holds").get<bool>());
  CHECK(summary.at("certificates").at("upper_holds").get<bool>());

  // every summary number is recomputable: lambda0 equals the weighted
  // start value of the emitted solution
  const std::string sol = slurp(tmp.path / "out" / "solution.csv");
  std::istringstream sl(sol);
  std::getline(sl, line);  // header
  std::getline(sl, line);  // first row, t = 0
  const auto c1 = line.find(',');
  const auto c2 = line.find(',', c1 + 1);
  const double v0 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
  CHECK(summary.at("lambda0").get<double>() == Catch::Approx(v0).epsilon(1e-14));
}

TEST_CASE("monotone run converges and reports certificates", "[cli]") {
  TempDir tmp;
  RunConfig cfg = psifde::cli::load_preset("example6");
  cfg.mode = "monotone";
  cfg.N = 64;
  cfg.tol = 1e-8;
  cfg.out_path = (tmp.path / "out").string();
  REQUIRE(psifde::cli::run(cfg) == 0);
  const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "summary.json"));
  CHECK(summary.at("iteration").at("converged").get<bool>());
  CHECK(summary.at("iteration").at("final_gap").get<double>() <= 1e-8);
  CHECK(fs::exists(tmp.path / "out" / "upper.csv"));
  // both extremal tables agree with the exact solution at T
  const std::string sol = slurp(tmp.path / "out" / "solution.csv");
  const std::string up = slurp(tmp.path / "out" / "upper.csv");
  auto last_v = [](const std::string& csv) {
    std::istringstream lines(csv);
    std::string line, prev;
    while (std::getline(lines, line))
      if (!line.empty() && line != "\r") prev = line;
    const auto c1 = prev.find(',');
    const auto c2 = prev.find(',', c1 + 1);
    return std::stod(prev.substr(c1 + 1, c2 - c1 - 1));
  };
  CHECK(last_v(sol) == Catch::Approx(0.4).margin(2e-4));
  CHECK(last_v(up) == Catch::Approx(0.4).margin(2e-4));
}

TEST_CASE("runs are deterministic byte for byte", "[cli]") {
  TempDir tmp;
  RunConfig cfg = psifde::cli::load_preset("example6");
  cfg.N = 48;
  cfg.max_iter = 6;
  cfg.tol = 1e-16;
  cfg.out_path = (tmp.path / "a").string();
  REQUIRE(psifde::cli::run(cfg) == 0);
  cfg.out_path = (tmp.path / "b").string();
  REQUIRE(psifde::cli::run(cfg) == 0);
  for (const char* name : {"solution.csv", "iterations.csv", "summary.json"}) {
    CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
  }
}

TEST_CASE("json output format", "[cli]") {
  TempDir tmp;
  RunConfig cfg = psifde::cli::load_preset("example6");
  cfg.N = 32;
  cfg.max_iter = 3;
  cfg.tol = 1e-16;
  cfg.format = "json";
  cfg.out_path = (tmp.path / "out").string();
  REQUIRE(psifde::cli::run(cfg) == 0);
  const auto sol = nlohmann::json::parse(slurp(tmp.path / "out" / "solution.json"));
  CHECK(sol.at("columns") == nlohmann::json({"t", "v", "y"}));
  CHECK(sol.at("rows").size() == 33);
}
