#pragma once

// Subcommands of the tqp driver. Each command takes a resolved JSON config
// (defaults, then the config file, then flag overrides) and produces an
// optional CSV body plus a JSON document carrying the metadata.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace tqp::cli {

using nlohmann::json;

/// Bad config or flags; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

struct GlobalOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> cutoff;
  std::optional<std::size_t> threads;
};

struct CommandOutput {
  std::optional<std::string> csv;
  json document;
  bool passed = true;
};

const std::vector<std::string>& command_names();

/// Default config of a command; every accepted key appears here.
json default_config(const std::string& command);

/// Defaults overlaid with `user` (unknown keys and type mismatches throw
/// UsageError) and then with the flag overrides.
json resolve_config(const std::string& command, const json& user, const GlobalOptions& flags);

CommandOutput entropy_sweep(const json& config);
CommandOutput fidelity_sweep(const json& config);
CommandOutput algebra_check(const json& config);
CommandOutput msuqc_demo(const json& config);
CommandOutput ns_check(const json& config);

CommandOutput run_command(const std::string& command, const json& config);

/// Locale-independent, 12 significant digits.
std::string format_number(double value);

/// Resolves, runs and writes outputs; returns the exit code. Messages go to
/// `err`, the JSON document to `out` when no --out prefix is given.
int execute(const std::string& command, const GlobalOptions& options, std::ostream& out, std::ostream& err);

}  // namespace tqp::cli
