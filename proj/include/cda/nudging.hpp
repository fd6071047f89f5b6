#pragma once

#include <string>

#include "cda/kse.hpp"
#include "cda/model.hpp"
#include "cda/nse.hpp"

namespace cda {

struct NudgingParams {
  double mu = 0.0;
  Projector projector;
};

enum class CflStatus { pass, boundary, unstable };

/// Explicit feedback is stable for mu <= 2 / dt.
struct CflReport {
  CflStatus status;
  double bound;   ///< 2 / dt
  double margin;  ///< bound / mu (infinite for mu = 0)
  std::string summary() const;
};

CflReport cfl_check(const NudgingParams& p, double dt);

/// One model step of v plus the explicit feedback
///   v_{n+1} = M(v_n) + dt W mu P_M(obs_n - v_n),
/// with W the scheme's weight (integrating factor for the KSE, one for the
/// NSE). `obs` must be supported on the observed modes.
void nudged_step(const ForwardModel& model, ModelState& v, const SpectralField& obs,
                 const NudgingParams& p);

inline void nudged_step_kse(const KseSolver& model, KseState& v, const SpectralField& obs,
                            const NudgingParams& p) {
  nudged_step(model, v, obs, p);
}

inline void nudged_step_nse(const NseSolver& model, NseState& v, const SpectralField& obs,
                            const NudgingParams& p) {
  nudged_step(model, v, obs, p);
}

}  // namespace cda
