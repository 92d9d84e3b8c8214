#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "nfold/modelfile.hpp"

namespace nfold {

/// Exit-code contract shared by the CLI and the bindings.
enum ExitCode : int { exit_pass = 0, exit_failure = 1, exit_input = 2, exit_unmatched = 3 };

struct CommandOptions {
  std::string branch = "minus";   // minus | plus | both (spectrum)
  std::optional<int> levels;      // grid levels per branch
  std::optional<int> grid;        // grid points
  std::optional<double> tol;      // main tolerance of the command
  std::uint64_t seed = 0;         // sampling seed, recorded in the report
  int threads = 0;                // 0: NFOLD_THREADS or hardware concurrency
};

/// Report schema version written into every report.
inline constexpr const char* report_schema_version = "1";

struct CommandResult {
  int exit_code = exit_pass;
  nlohmann::json report;
  std::string csv;      // header line plus rows; empty when the command has no table
  std::string plot;     // gnuplot data blocks separated by two blank lines
  std::string summary;  // short human-readable text
};

CommandResult cmd_verify(const ModelFile& model, const CommandOptions& opt);
CommandResult cmd_spectrum(const ModelFile& model, const CommandOptions& opt);
CommandResult cmd_certify_g(const ModelFile& model, const CommandOptions& opt);
CommandResult cmd_index(const ModelFile& model, const CommandOptions& opt);

/// Loads `path` and runs `command` (verify | spectrum | certify-g | index).
/// Input errors (unreadable or malformed file, inapplicable command, bad
/// options) yield exit_input with the message in report["error"].
CommandResult run_command(const std::string& command, const std::string& path, const CommandOptions& opt);
CommandResult run_command_text(const std::string& command, const std::string& model_text, const CommandOptions& opt);

/// Parallelism cap from NFOLD_THREADS (at least 1).
int thread_cap(int requested = 0);

}  // namespace nfold
