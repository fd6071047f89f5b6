#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cda/twin_lab.hpp"

namespace cda {

/// Parameter lists whose Cartesian product defines the sweep points.
struct SweepSpec {
  std::vector<double> mu;
  std::vector<int> members;
  std::vector<double> sigma_I2;
  std::vector<double> sigma_E2;
  std::vector<double> sigma_O2;

  bool empty() const;
};

struct ExperimentConfig {
  std::string preset;
  TwinConfig twin;
  std::string output_dir = "out";
  bool emit_plots = false;
  int workers = 1;
  SweepSpec sweep;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset_config(std::string_view name);

/// Reads a YAML (or JSON) experiment file. Missing keys take the values of
/// the preset named by `preset`, or of the default preset for `model.kind`.
/// Unknown keys and invalid values throw ConfigError naming the key path.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_string(std::string_view text);

struct SweepPoint {
  std::string label;  ///< "run" for a single point, else "mu=10,K=32"
  std::string dir;    ///< directory name under output_dir
  TwinConfig twin;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

/// Resolved configuration in the input schema; parse_config accepts it back.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
nlohmann::json twin_to_json(const TwinConfig& twin);

}  // namespace cda
