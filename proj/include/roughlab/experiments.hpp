#pragma once

#include "roughlab/config.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace roughlab {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitRejected = 2, kExitUsage = 64 };

struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::string> artifacts;  // file names relative to the output directory
    std::string summary;
};

// Runs a validated configuration, writing CSV artifacts into out. Parameter
// combinations rejected before any computation raise ConfigError.
RunOutcome run_experiment(const RunConfig& cfg, const std::filesystem::path& out, std::size_t workers,
                          std::ostream& log);

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    std::string out_dir;  // empty: $ROUGHLAB_OUT, then ./roughlab-out
};

// Parse, validate, run, and write manifest.json. Returns the process exit code.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

// One "name: description" line per experiment, in a fixed order.
std::string list_experiments();

}  // namespace roughlab
