#pragma once

// Benchmark harness plumbing: configuration resolution and run exports.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "moqd/schedulers.hpp"

namespace moqd::cli {

// Bad flag, bad value or inconsistent combination; the CLI exits with 2.
class UsageError : public ConfigError {
 public:
  explicit UsageError(const std::string& what) : ConfigError(what) {}
};

// --help was requested; carries the rendered help text.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

struct CliInvocation {
  RunConfig config;
  std::filesystem::path out_dir = "moqd_out";
};

/// Flags override --config file values, which override the built-in
/// defaults. `args` excludes the program name.
CliInvocation parse_config(const std::vector<std::string>& args);

nlohmann::json to_json(const RunConfig& config);

/// Applies the keys present in `doc` on top of `base`. Unknown keys and
/// out-of-range values raise UsageError.
RunConfig apply_json(const nlohmann::json& doc, RunConfig base);

void write_metrics_csv(std::ostream& out, const std::vector<IterationMetrics>& metrics);
void write_heatmap_csv(std::ostream& out, const CvtArchive& archive);
void write_visits_csv(std::ostream& out, const CvtArchive& archive);
nlohmann::json fronts_document(const RunResult& result);

/// Runs the configured algorithm and writes metrics.csv, heatmap.csv,
/// visits.csv, fronts.json and config.resolved into `out_dir`. Returns the
/// process exit status; diagnostics go to `log`.
int run_and_export(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace moqd::cli
