#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace gausscap {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_nonconvergence = 3, exit_selftest = 4 };

const std::vector<std::string>& command_names();

/// Every key a command understands, with its default value.
nlohmann::ordered_json default_config(const std::string& command);

/// Overlay `user` on the defaults. Unknown keys and mistyped values throw
/// ValidationError; the result is the fully materialized config.
nlohmann::ordered_json materialize_config(const std::string& command, const nlohmann::ordered_json& user);

struct RunInfo {
  int exit_code = exit_ok;
  /// Optional CSV table written next to the result.
  std::string csv;
  /// Wall-clock timings, kept out of the result so it stays reproducible.
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
};

/// Execute one command on a materialized config; the returned record is a
/// pure function of the config.
nlohmann::ordered_json run_command(const std::string& command, const nlohmann::ordered_json& config, RunInfo& info);

/// Full command line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace gausscap
