#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psl/commands.hpp"
#include "psl/errors.hpp"

using namespace psl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string field_of(const char* text) {
  try {
    parse_config(nlohmann::json::parse(text));
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string(PSL_CLI_PATH) + " " + args + " >/dev/null 2>" + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("shortest round-trip float formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-17) == "-2.5e-17");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("config parsing fills defaults and round-trips") {
  const auto cfg = load_config(fs::path(PSL_CONFIG_DIR) / "two_bumps.json");
  CHECK(cfg.state.profile.bumps().size() == 2);
  CHECK(cfg.state.Z == cplx(0.5, -0.25));
  CHECK(cfg.omega_grid.n == 31);
  CHECK(cfg.nullspace.n == 321);
  const auto again = parse_config(nlohmann::json::parse(cfg.to_json().dump()));
  CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("config errors name the field") {
  CHECK(field_of(R"({"state":{"rho":{"bumps":[{"a":1,"c":0,"w":0}]}}})") == "state.rho.bumps[0].w");
  CHECK(field_of(R"({"state":{"p":-1}})") == "state.p");
  CHECK(field_of(R"({"state":{"Z":[1]}})") == "state.Z");
  CHECK(field_of(R"({"constants":{"gamma":0}})") == "constants.gamma");
  CHECK(field_of(R"({"numerics":{"omega_grid":{"n":1}}})") == "numerics.omega_grid.n");
  CHECK(field_of(R"({"numerics":{"rel_tol":"x"}})") == "numerics.rel_tol");
  CHECK(field_of(R"({"state":{"omgea":1}})") == "state.omgea");
  CHECK(field_of(R"({"energy_scan":{"kappas":[1,"a"]}})") == "energy_scan.kappas[1]");
}

TEST_CASE("invariants command writes closed-form values with the echoed config") {
  const fs::path out = fs::temp_directory_path() / "psl_test_cli_invariants";
  fs::remove_all(out);
  const auto cfg = load_config(fs::path(PSL_CONFIG_DIR) / "reference.json");
  const auto files = run_command("invariants", cfg, out);
  REQUIRE(files.size() == 1);
  const auto doc = nlohmann::json::parse(slurp(files[0]));
  CHECK(doc["config"] == nlohmann::json::parse(cfg.to_json().dump()));
  CHECK(doc["result"]["I0"]["re"].get<double>() == doctest::Approx(0.886227).epsilon(1e-6));
  CHECK(doc["result"]["JP"].get<double>() == doctest::Approx(0.785398).epsilon(1e-6));
  CHECK(doc["result"]["S"].get<double>() == 0.0);
  CHECK_THROWS_AS(run_command("nope", cfg, out), ValidationError);
}

TEST_CASE("CLI exit codes and machine-readable errors") {
  const fs::path dir = fs::temp_directory_path() / "psl_test_cli_exit";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"state":{"rho":{"bumps":[{"a":1,"c":0,"w":0}]}}})";
  const fs::path err = dir / "stderr.txt";

  CHECK(run_cli("--config " + bad.string() + " --out " + (dir / "o").string() + " --command invariants", err) == 1);
  const auto e = nlohmann::json::parse(slurp(err));
  CHECK(e["error"] == "ValidationError");
  CHECK(e["field"].get<std::string>().find("bumps[0].w") != std::string::npos);

  const std::string ref = (fs::path(PSL_CONFIG_DIR) / "reference.json").string();
  CHECK(run_cli("--config " + ref + " --out " + (dir / "o").string() + " --command index", err) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "o" / "index.json"))["result"]["winding_index"] == 1);
  CHECK(run_cli("--config " + ref + " --out " + (dir / "o").string() + " --command bogus", err) == 1);

  // An integration budget too small to converge is a numerical failure.
  const fs::path tight = dir / "tight.json";
  std::ofstream(tight) << R"({"numerics":{"max_panels":1,"rel_tol":1e-15,"abs_tol":1e-300}, "state":{"omega":3}})";
  CHECK(run_cli("--config " + tight.string() + " --out " + (dir / "o").string() + " --command invariants", err) == 2);
  CHECK(nlohmann::json::parse(slurp(err))["error"] == "NonConvergence");
}
