#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace klmap::cli {

/// Exit-code contract shared by all subcommands.
enum ExitCode {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kNotConverged = 4,
  kBoundViolation = 5,
};

struct CommandOptions {
  std::string config_path;
  std::optional<int> truncation_n;           // solve --n
  std::optional<std::string> out_override;   // --out beats KLMAP_OUTPUT_DIR beats config
  bool corrupt_gradient = false;             // gradcheck negative control (debug builds)
};

/// Output directory for a run: --out, then the KLMAP_OUTPUT_DIR environment
/// variable, then [output] directory from the config.
std::filesystem::path resolve_output_dir(const CommandOptions& opts,
                                         const std::string& config_directory);

int cmd_kl_eigs(const CommandOptions& opts);    // eigenvalues.csv, eigenfunctions.csv
int cmd_solve(const CommandOptions& opts);      // solution.csv, solution_nodal.csv, trace.csv
int cmd_verify(const CommandOptions& opts);     // bounds.csv [, bounds.svg]
int cmd_gradcheck(const CommandOptions& opts);  // prints max relative gradient error

}  // namespace klmap::cli
