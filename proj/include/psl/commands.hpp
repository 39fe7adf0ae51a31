#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "psl/config.hpp"

namespace psl {

/// Names accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// Shortest decimal string that parses back to the same double ("inf", "-inf", "nan" otherwise).
std::string format_double(double v);

/// Runs one analysis and writes its artifacts into out_dir (created if needed).
/// Returns the written paths. Throws ValidationError for an unknown command.
std::vector<std::filesystem::path> run_command(const std::string& command, const RunConfig& config,
                                               const std::filesystem::path& out_dir);

} // namespace psl
