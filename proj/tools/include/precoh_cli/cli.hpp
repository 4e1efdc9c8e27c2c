#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace precoh::cli {

inline constexpr const char* kVersion = "0.1.0";

// Fully resolved run description: command, seed, output directory and the
// command-specific parameters as canonical strings (file values overridden
// by flags, defaults filled in). parse_config validates types and ranges, so
// a RunConfig in hand is runnable.
struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::string output_dir;
    std::map<std::string, std::string> params;
};

// args excludes the program name: {"collapse", "--p", "0.3,0.7", ...}.
// Accepts --key value and --key=value; --config FILE merges a JSON or TOML
// file with flags taking precedence. Unknown keys, missing required keys and
// unconvertible values throw UnknownKey / MissingRequired / TypeError, each
// naming the key.
RunConfig parse_config(const std::vector<std::string>& args);

// Runs the command, writing manifest.json and the command's artifacts under
// output_dir. Returns the paths written, manifest first.
std::vector<std::string> execute(const RunConfig& config);

// parse_config + execute with errors mapped to exit codes: 0 success,
// 1 validation error, 2 runtime error.
int run(const std::vector<std::string>& args);

}  // namespace precoh::cli
