#pragma once

// Subcommand dispatch, report assembly and deterministic artifact output.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "minl2/config.hpp"

namespace minl2 {

using Json = nlohmann::json;

inline constexpr const char* kVersion = MINL2_VERSION;

struct RunOptions {
  std::string out_dir;  // overrides the config's output_dir when non-empty
  std::optional<int> resolution;
  std::optional<double> tol;  // overrides tolerances.rel
  bool write_files = true;
};

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  Json report;  // verdicts, witnesses, residuals
  std::vector<Artifact> csv;
  std::string error;  // failing check message, empty on success
  double wall_seconds = 0.0;
};

struct RunReport {
  std::string config_name;
  std::string config_hash;
  std::string version = kVersion;
  std::vector<CheckResult> checks;
  bool pass = true;

  /// Wall times included; the per-check files never carry them.
  Json to_json() const;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& subcommands();
bool is_check(const std::string& name);

/// Applies the command-line overrides to a parsed config.
void apply_overrides(ExperimentConfig& config, const RunOptions& options);

/// Runs one check. Numerical errors are caught and reported as a failed check.
CheckResult run_check(const std::string& subcommand, const ExperimentConfig& config);

/// Runs the subcommands and writes <check>.json, CSV artifacts and run_report.json.
RunReport run(const std::vector<std::string>& checks, const ExperimentConfig& config, const RunOptions& options);

struct SuiteEntry {
  std::string name;
  std::string file;
  std::string status;  // "pass", "fail" or "config-error"
  std::string message;
  std::optional<RunReport> report;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;  // sorted by config file name
  bool empty = false;
  int exit_code() const;
  Json to_json() const;
};

/// Runs every *.cfg in a directory; failures stay local to their config.
SuiteReport run_suite(const std::string& config_dir, const RunOptions& options, std::ostream& log);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

/// %.17g formatting used in every CSV.
std::string format_double(double x);

}  // namespace minl2
