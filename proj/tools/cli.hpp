#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace morsekit::cli {

enum class Command { kAnalyze, kMorsify, kCover, kVerify, kSard };
enum class Format { kJson, kCsv };

std::string command_name(Command c);

/// Everything a run depends on. Embedded verbatim in every report.
struct RunConfig {
  Command command = Command::kAnalyze;
  std::string manifold_file;
  std::string field_expression;
  double epsilon = 0.01;
  std::uint64_t rng_seed = 1;
  int grid_density = 0;  // 0: 64 for curves, 24 otherwise
  std::string output;    // empty: $MORSEKIT_OUT_DIR/<command>.<ext>, else stdout
  Format format = Format::kJson;
  std::map<std::string, std::string> tolerance_overrides;
};

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;

/// Runs one command. The report goes to the configured destination (or
/// `out`); diagnostics go to `err` as "error[Code]: message". Input
/// problems (parse errors, bad arguments, unreadable files) exit 2; failed
/// checks and failures inside the analysis exit 1.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and runs. Returns the exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace morsekit::cli
