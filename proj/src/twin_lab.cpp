#include "cda/twin_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cda/errors.hpp"

namespace cda {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Accumulates wall-clock time of a scope into a counter.
class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink), start_(Clock::now()) {}
  ~ScopedTimer() { sink_ += seconds_since(start_); }

 private:
  double& sink_;
  Clock::time_point start_;
};

}  // namespace

std::string to_string(ModelKind m) { return m == ModelKind::kse ? "kse" : "nse"; }

std::string to_string(Method m) {
  switch (m) {
    case Method::nudging: return "nudging";
    case Method::enkf: return "enkf";
    case Method::free_run: return "free-run";
  }
  return "?";
}

std::string to_string(ObservedField f) {
  return f == ObservedField::streamfunction ? "streamfunction" : "vorticity";
}

std::string to_string(NudgingInit v) { return v == NudgingInit::zero ? "zero" : "projected"; }

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blow_up: return "blow_up";
    case RunStatus::gain_degenerate: return "gain_degenerate";
  }
  return "?";
}

std::int64_t TwinConfig::horizon_steps() const { return std::llround(horizon / dt()); }

void TwinConfig::validate() const {
  if (model == ModelKind::kse)
    kse.validate();
  else
    nse.validate();
  if (!(horizon > 0.0)) throw ConfigError("run.horizon must be positive");
  if (!(spin_up_time >= 0.0)) throw ConfigError("run.spin_up_time must be non-negative");
  if (record_stride < 1) throw ConfigError("run.record_stride must be at least 1");
  if (std::abs(horizon / dt() - double(horizon_steps())) > 1e-9 * double(horizon_steps()) + 1e-9)
    throw ConfigError("run.horizon must be a whole number of time steps");
  if (horizon_steps() % record_stride != 0)
    throw ConfigError("run.record_stride must divide the number of time steps");
  if (!(sigma_O2 >= 0.0)) throw ConfigError("observations.sigma_O2 must be non-negative");
  if (!(sigma_E2 >= 0.0)) throw ConfigError("method.sigma_E2 must be non-negative");
  if (!(sigma_I2 >= 0.0)) throw ConfigError("method.sigma_I2 must be non-negative");
  if (!(free_run_perturbation2 >= 0.0))
    throw ConfigError("method.perturbation2 must be non-negative");
  if (!(mu >= 0.0)) throw ConfigError("method.mu must be non-negative");
  const auto m = make_model(*this);
  projector().validate(m->grid());
  if (method == Method::enkf) {
    EnkfParams p{members, sigma_E2, sigma_I2, projector(), condition_limit, gain_form};
    p.validate(m->grid());
  }
}

std::unique_ptr<ForwardModel> make_model(const TwinConfig& cfg) {
  if (cfg.model == ModelKind::kse) return std::make_unique<KseSolver>(cfg.kse);
  return std::make_unique<NseSolver>(cfg.nse);
}

ErrorRecord error_decomposition(const SpectralField& truth, const SpectralField& estimate,
                                const Projector& p, double time) {
  const SpectralField diff = truth - estimate;
  return {time, l2_norm(diff, Part::observed, p), l2_norm(diff, Part::complement, p),
          l2_norm(diff, Part::all, p)};
}

ObservationStream::ObservationStream(const WaveGrid& grid, const Projector& p, double sigma_O2,
                                     ObservedField field, std::uint64_t seed)
    : projector_(p),
      sigma_O2_(sigma_O2),
      field_(field),
      rng_(RngStream::named(seed, "reference-noise")),
      noise_weight_(grid.size(), 1.0) {
  if (field == ObservedField::vorticity) {
    int k1 = 0, k2 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.wavevector(i, k1, k2);
      const double a = grid.physical_wavenumber(k1), b = grid.physical_wavenumber(k2);
      const double k2phys = a * a + b * b;
      noise_weight_[i] = k2phys > 0.0 ? 1.0 / k2phys : 0.0;
    }
  }
}

SpectralField ObservationStream::observe(const SpectralField& truth) {
  SpectralField obs = project(truth, projector_, Part::observed);
  if (sigma_O2_ > 0.0) {
    SpectralField eta = generate_noise(truth.grid(), {sigma_O2_, projector_.cutoff}, rng_);
    for (std::size_t i = 0; i < obs.size(); ++i) obs[i] += noise_weight_[i] * eta[i];
  }
  return obs;
}

ModelState generate_reference(const TwinConfig& cfg, const ForwardModel& model) {
  ModelState s = model.initial_state();
  const std::int64_t steps = std::llround(cfg.spin_up_time / model.dt());
  for (std::int64_t i = 0; i < steps; ++i) model.step(s);
  s.steps = 0;
  s.time = 0.0;
  return s;
}

RunResult run_twin_experiment(const TwinConfig& cfg, const ModelState* spun_up,
                              const std::function<void(const ErrorRecord&)>& on_record) {
  cfg.validate();
  const auto start = Clock::now();
  RunResult result;
  const auto model = make_model(cfg);
  const Projector projector = cfg.projector();
  result.obs_modes = int(observed_modes(model->grid(), projector).size());
  result.cfl = cfl_check(NudgingParams{cfg.mu, projector}, cfg.dt());

  ModelState truth = spun_up ? *spun_up : generate_reference(cfg, *model);
  truth.steps = 0;
  truth.time = 0.0;
  result.spin_up_seconds = seconds_since(start);

  ObservationStream observations(model->grid(), projector, cfg.sigma_O2, cfg.observed_field,
                                 cfg.seed);
  const NudgingParams nudging{cfg.method == Method::nudging ? cfg.mu : 0.0, projector};

  ModelState estimate{SpectralField(model->grid())};
  std::optional<EnsembleKalmanFilter> filter;
  Ensemble ensemble;
  if (cfg.method == Method::enkf) {
    filter.emplace(*model, EnkfParams{cfg.members, cfg.sigma_E2, cfg.sigma_I2, projector,
                                      cfg.condition_limit, cfg.gain_form},
                   cfg.seed, cfg.exec);
  } else if (cfg.method == Method::free_run) {
    estimate = truth;
    RngStream rng = RngStream::named(cfg.seed, "free-run-perturbation");
    add_noise(estimate.field, {cfg.free_run_perturbation2, projector.cutoff}, rng);
  }

  const std::int64_t nsteps = cfg.horizon_steps();
  for (std::int64_t n = 0; n <= nsteps; ++n) {
    const bool record = n % cfg.record_stride == 0;
    SpectralField obs = cfg.method == Method::free_run ? SpectralField(model->grid())
                                                       : observations.observe(truth.field);
    try {
      if (cfg.method == Method::enkf) {
        // The ensemble enters each step as an uninflated forecast, which is
        // where the error is measured.
        if (n == 0) {
          ScopedTimer timer(result.method_seconds);
          ensemble = filter->init_ensemble(obs);
        }
        if (record) {
          ErrorRecord r = error_decomposition(truth.field, ensemble_mean_state(ensemble),
                                              projector, truth.time);
          result.records.push_back(r);
          if (on_record) on_record(r);
        }
        if (n == nsteps) break;
        ScopedTimer timer(result.method_seconds);
        if (n > 0) filter->inflate(ensemble);
        filter->analysis_step(ensemble, obs);
        filter->forecast(ensemble);
      } else {
        if (n == 0 && cfg.method == Method::nudging && cfg.nudging_init == NudgingInit::projected)
          estimate.field = obs;
        if (record) {
          ErrorRecord r = error_decomposition(truth.field, estimate.field, projector, truth.time);
          result.records.push_back(r);
          if (on_record) on_record(r);
        }
        if (n == nsteps) break;
        ScopedTimer timer(result.method_seconds);
        nudged_step(*model, estimate, obs, nudging);
      }
    } catch (const BlowUpError& e) {
      result.status = RunStatus::blow_up;
      result.failure_message = e.what();
      result.failure_time = e.time();
      result.failure_member = e.member();
      break;
    } catch (const GainDegeneracyError& e) {
      result.status = RunStatus::gain_degenerate;
      result.failure_message = e.what();
      result.failure_time = truth.time;
      break;
    }
    model->step(truth);
  }
  result.total_seconds = seconds_since(start);
  return result;
}

StationaryStats stationary_stats(const std::vector<ErrorRecord>& records, ErrorComponent c) {
  StationaryStats s;
  if (records.empty()) return s;
  const double t_end = records.back().time;
  const double t_start = records.front().time + 2.0 * (t_end - records.front().time) / 3.0;
  std::vector<double> v;
  for (const auto& r : records) {
    if (r.time + 1e-12 < t_start) continue;
    v.push_back(c == ErrorComponent::observed     ? r.err_observed
                : c == ErrorComponent::unobserved ? r.err_unobserved
                                                  : r.err_total);
  }
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * double(v.size() - 1);
    const std::size_t lo = std::size_t(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
  };
  s.median = quantile(0.5);
  s.p10 = quantile(0.1);
  s.p90 = quantile(0.9);
  s.samples = v.size();
  return s;
}

}  // namespace cda
