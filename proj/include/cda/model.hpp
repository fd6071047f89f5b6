#pragma once

#include <cstdint>
#include <string>

#include "cda/spectral.hpp"

namespace cda {

/// Spectral state of either PDE. Time is always steps * dt.
struct ModelState {
  SpectralField field;
  std::int64_t steps = 0;
  double time = 0.0;
};

/// Divergence guard shared by both solvers: any |coeff| above this, or a
/// non-finite coefficient, aborts the run.
inline constexpr double kBlowUpThreshold = 1e10;

/// Throws BlowUpError if the state trips the divergence guard.
void check_divergence(const ModelState& state, int member = -1);

/// One-step map of a pseudospectral PDE with a diagonal linear part.
/// Implementations hold only immutable tables after construction, so one
/// instance may step many states concurrently.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual const WaveGrid& grid() const = 0;
  virtual double dt() const = 0;
  virtual std::string name() const = 0;

  /// Canonical initial data of the model (before any spin-up).
  virtual ModelState initial_state() const = 0;

  /// One time step without the divergence check.
  virtual void advance(ModelState& state) const = 0;

  /// next += dt * W * increment, where W is the per-mode weight the scheme
  /// applies to an explicit forcing term (the integrating factor for the
  /// KSE scheme, identity for the NSE scheme).
  virtual void add_explicit_increment(SpectralField& next, const SpectralField& increment) const = 0;

  /// advance() followed by the divergence guard.
  void step(ModelState& state) const {
    advance(state);
    check_divergence(state);
  }

 protected:
  void tick(ModelState& state) const {
    ++state.steps;
    state.time = double(state.steps) * dt();
  }
};

}  // namespace cda
