#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "psl/commands.hpp"
#include "psl/errors.hpp"

namespace {

// Exit codes: 0 success, 1 invalid input, 2 numerical failure.
int report(int code, const nlohmann::ordered_json& err) {
  std::cerr << err.dump() << "\n";
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar string laboratory: invariants, constraints, mass curves, evolution and worldsheets"};
  std::string config_path;
  std::string out_dir = ".";
  std::string command;
  std::string names;
  for (const auto& n : psl::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--command", command, "One of: " + names)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(1, {{"error", "ValidationError"}, {"field", "arguments"}, {"message", e.what()}});
  }

  try {
    const auto cfg = psl::load_config(config_path);
    for (const auto& path : psl::run_command(command, cfg, out_dir)) std::cout << path.string() << "\n";
    return 0;
  } catch (const psl::ValidationError& e) {
    return report(1, {{"error", "ValidationError"}, {"field", e.field()}, {"message", e.what()}});
  } catch (const psl::NumericalError& e) {
    return report(2, {{"error", e.kind()}, {"message", e.what()}});
  } catch (const std::exception& e) {
    return report(2, {{"error", "InternalError"}, {"message", e.what()}});
  }
}
