#pragma once

// Subcommands of the bcsgap tool. Each writes its artifacts under the output
// directory together with MANIFEST.json, and reports through an exit code.

#include "bcsgap/run_config.hpp"
#include "bcsgap/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace bcsgap {

enum ExitCode : int {
   kExitOk = 0,
   kExitVerifyFailed = 2,
   kExitConfig = 3,
   kExitIo = 4,
   kExitNonConvergence = 5,
};

struct CommandOptions {
   std::string config_path;
   std::optional<std::string> out_dir; // overrides output.directory
   std::optional<std::uint64_t> seed;  // overrides solver.seed
};

// Commands: constants, curve, solve, derivatives, verify.
const std::vector<std::string> &command_names();

/// Loads the configuration, runs the command and maps failures to exit codes;
/// diagnostics go to err.
int run_command(const std::string &command, const CommandOptions &options, std::ostream &out,
                std::ostream &err);

// Building blocks, exposed for tests. They throw instead of returning codes.
nlohmann::json constants_json(const RunConfig &cfg);
nlohmann::json report_json(const std::vector<CheckResult> &results);
nlohmann::json window_json(const CouplingWindowReport &report);
std::string format_double(double v); // 17 significant digits

} // namespace bcsgap
