#pragma once

// Command-line experiments. Every run is a pure function of its resolved
// configuration: the outputs are computed in memory, written under the output
// directory and listed, with content hashes, in manifest.json. Replaying a
// manifest recomputes the outputs and compares them byte for byte.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace rp::harness {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 2,
  kDiverged = 3,
  kReplayMismatch = 5,
  kUsage = 64,
};

/// Environment variable overriding the default output directory.
inline constexpr const char* kOutputDirEnv = "ROUGHPATH_OUTPUT_DIR";

struct RunResult {
  std::map<std::string, std::string> files;  // file name -> contents
  std::vector<std::string> report;           // human-readable lines for stdout
  json grids = json::object();
  std::vector<std::string> inputs;           // input files read by the run
};

/// Subcommands with their built-in defaults.
const std::map<std::string, json>& command_defaults();

/// Runs one experiment from a fully resolved config (no I/O besides inputs).
RunResult run_command(const std::string& command, const json& config);

/// git blob hash (SHA-1 of "blob <size>\0<content>") in hex.
std::string git_blob_hash(const std::string& content);

/// Writes outputs and manifest.json into dir; returns the manifest.
json write_run(const std::filesystem::path& dir, const std::string& command, const json& config,
               const json& provenance, const RunResult& result, double seconds);

/// Replays a manifest. Prints the first differing cell on mismatch.
int run_reproduce(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rp::harness
