// Command-line driver for twin experiments: run, sweep, presets, validate.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cda/config.hpp"
#include "cda/errors.hpp"
#include "cda/output.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool emit_plots = false;
  bool allow_failures = false;
};

cda::ExperimentConfig load(const std::string& path, const Overrides& o) {
  cda::ExperimentConfig cfg = cda::parse_config(path);
  if (o.seed) cfg.twin.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous data assimilation twin experiments (nudging and EnKF)"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment file (YAML or JSON)")->required();
    cmd->add_option("--seed", overrides.seed, "override run.seed");
    cmd->add_option("--out", overrides.out, "override output.dir");
    cmd->add_flag("--emit-plots", overrides.emit_plots, "write SVG error plots");
    cmd->add_flag("--allow-failures", overrides.allow_failures,
                  "exit 0 even if a run blows up or the gain degenerates");
  };

  auto* run = app.add_subcommand("run", "run a single experiment");
  add_run_flags(run);
  auto* sweep = app.add_subcommand("sweep", "run every point of the sweep block");
  add_run_flags(sweep);
  auto* presets = app.add_subcommand("presets", "print the built-in parameter presets");
  auto* validate = app.add_subcommand("validate", "check an experiment file and print it resolved");
  validate->add_option("config", config_path, "experiment file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const auto& name : cda::preset_names()) {
        std::cout << "# " << name << "\n"
                  << cda::config_to_json(cda::preset_config(name)).dump(2) << "\n";
      }
      return cda::kExitOk;
    }
    if (validate->parsed()) {
      const auto cfg = cda::parse_config(config_path);
      std::cout << cda::config_to_json(cfg).dump(2) << "\n";
      std::cout << "ok: " << cda::expand_sweep(cfg).size() << " run(s)\n";
      return cda::kExitOk;
    }
    const auto cfg = load(config_path, overrides);
    if (run->parsed() && cda::expand_sweep(cfg).size() != 1) {
      std::cerr << "error: config defines a sweep; use `sweep` instead of `run`\n";
      return cda::kExitValidation;
    }
    cda::RunOptions options;
    options.emit_plots = overrides.emit_plots;
    options.allow_failures = overrides.allow_failures;
    return cda::run_and_emit(cfg, options);
  } catch (const cda::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cda::kExitValidation;
  } catch (const cda::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cda::kExitNumerical;
  }
}
