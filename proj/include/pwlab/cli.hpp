#pragma once

// Command-line front end. Every command reads its inputs from files and
// writes its outputs to files; nothing is shared between invocations.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwlab/forest.hpp"

namespace pwlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitRuntime = 4;

/// Defaults for every command, loaded from a "run/1" JSON file. Relative
/// paths resolve against the file's directory. Flags win over these.
struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> crawl;
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> model;
    std::optional<std::filesystem::path> reports;
    std::optional<std::filesystem::path> gencfg;
    std::optional<std::filesystem::path> lexicon;
    std::optional<TrainConfig> train;
};

RunConfig load_run_config(const std::filesystem::path& file);
std::string serialize_run_config(const RunConfig& cfg);

/// Exit code for a library error code ("InputError" -> 3, ...).
int exit_code_for(const std::string& error_code);

/// Runs one invocation; `args` excludes the program name. Errors are
/// reported as a single line on `err`: "pwlab: error[<Code>]: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwlab::cli
