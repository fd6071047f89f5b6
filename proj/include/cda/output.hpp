#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cda/config.hpp"
#include "cda/twin_lab.hpp"

namespace cda {

/// time,err_observed,err_unobserved,err_total with 17 significant digits.
void write_error_csv(const std::filesystem::path& path, const std::vector<ErrorRecord>& records);
std::vector<ErrorRecord> read_error_csv(const std::filesystem::path& path);

/// Writes to a temporary file in the same directory and renames it over
/// `path`, so readers never see a partial document.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<ErrorRecord> records;
};

/// Three log-linear panels (observed, unobserved, total error) with a
/// reference line at double-precision machine epsilon.
std::string render_error_plot_svg(const std::vector<PlotSeries>& series, const std::string& title);

nlohmann::json run_manifest(const SweepPoint& point, const ExperimentConfig& cfg,
                            const RunResult& result);

struct RunOptions {
  bool emit_plots = false;
  bool allow_failures = false;
  bool quiet = false;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Runs every sweep point and writes <out>/<point>/{errors.csv, manifest.json,
/// config.json[, errors.svg]} plus <out>/comparison.svg when plotting.
/// Returns kExitNumerical if any point failed and failures are not allowed.
int run_and_emit(const ExperimentConfig& cfg, const RunOptions& options);

}  // namespace cda
