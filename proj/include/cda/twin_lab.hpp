#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cda/enkf.hpp"
#include "cda/kse.hpp"
#include "cda/model.hpp"
#include "cda/nse.hpp"
#include "cda/nudging.hpp"

namespace cda {

enum class ModelKind { kse, nse };
enum class Method { nudging, enkf, free_run };
/// Which NSE field the observations measure. Vorticity noise is mapped back
/// to the streamfunction by the per-mode factor 1/|k|^2.
enum class ObservedField { streamfunction, vorticity };
enum class NudgingInit { zero, projected };

std::string to_string(ModelKind m);
std::string to_string(Method m);
std::string to_string(ObservedField f);
std::string to_string(NudgingInit v);

struct TwinConfig {
  ModelKind model = ModelKind::kse;
  Method method = Method::nudging;
  KseParams kse;
  NseParams nse;

  // observations
  int observed_modes = 16;  ///< M
  double sigma_O2 = 0.0;
  ObservedField observed_field = ObservedField::streamfunction;

  // nudging
  double mu = 100.0;
  NudgingInit nudging_init = NudgingInit::zero;

  // enkf
  int members = 32;
  double sigma_E2 = 1e-16;
  double sigma_I2 = 1e-14;
  double condition_limit = 1e12;
  GainForm gain_form = GainForm::complex;

  // free run: estimate = reference + observed-mode noise of this variance
  double free_run_perturbation2 = 1e-6;

  double spin_up_time = 1000.0;
  double horizon = 100.0;
  int record_stride = 10;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;

  double dt() const { return model == ModelKind::kse ? kse.dt : nse.dt; }
  std::int64_t horizon_steps() const;
  Projector projector() const { return Projector{observed_modes}; }
  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

std::unique_ptr<ForwardModel> make_model(const TwinConfig& cfg);

struct ErrorRecord {
  double time = 0.0;
  double err_observed = 0.0;
  double err_unobserved = 0.0;
  double err_total = 0.0;
};

ErrorRecord error_decomposition(const SpectralField& truth, const SpectralField& estimate,
                                const Projector& p, double time = 0.0);

/// Emits P_M(u) + eta with a fresh draw per call from the "reference-noise"
/// stream of the experiment seed.
class ObservationStream {
 public:
  ObservationStream(const WaveGrid& grid, const Projector& p, double sigma_O2,
                    ObservedField field, std::uint64_t seed);

  SpectralField observe(const SpectralField& truth);

 private:
  Projector projector_;
  double sigma_O2_;
  ObservedField field_;
  RngStream rng_;
  std::vector<double> noise_weight_;  // 1, or 1/|k|^2 for vorticity
};

/// Spins the model up from its canonical initial data for cfg.spin_up_time
/// and restarts the clock at zero. Deterministic in cfg.
ModelState generate_reference(const TwinConfig& cfg, const ForwardModel& model);

enum class RunStatus { completed, blow_up, gain_degenerate };
std::string to_string(RunStatus s);

struct RunResult {
  std::vector<ErrorRecord> records;
  RunStatus status = RunStatus::completed;
  std::string failure_message;
  double failure_time = 0.0;
  int failure_member = -1;

  double spin_up_seconds = 0.0;
  double total_seconds = 0.0;
  /// Wall-clock of the assimilation method alone (reference stepping and
  /// observation generation excluded).
  double method_seconds = 0.0;

  int obs_modes = 0;  ///< independent observed modes (conjugates excluded)
  CflReport cfl{};
};

/// Runs reference and estimate in lockstep. Observations at t_n drive the
/// step to t_{n+1}; errors are recorded every record_stride steps (and at
/// t = 0). For the EnKF the estimate is the mean of the forecast ensemble
/// before inflation is added. Method failures end the run early with the
/// records gathered so far; a reference blow-up throws.
///
/// If `spun_up` is given it replaces the spin-up of the reference.
RunResult run_twin_experiment(const TwinConfig& cfg, const ModelState* spun_up = nullptr,
                              const std::function<void(const ErrorRecord&)>& on_record = {});

/// Median and 10/90 percentiles of one error component over the final third
/// of a record sequence.
struct StationaryStats {
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  std::size_t samples = 0;
};

enum class ErrorComponent { observed, unobserved, total };
StationaryStats stationary_stats(const std::vector<ErrorRecord>& records, ErrorComponent c);

}  // namespace cda
