#include "cda/nudging.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cda {

std::string CflReport::summary() const {
  std::ostringstream os;
  switch (status) {
    case CflStatus::pass: os << "pass"; break;
    case CflStatus::boundary: os << "boundary"; break;
    case CflStatus::unstable: os << "unstable"; break;
  }
  os << " (mu bound 2/dt = " << bound << ", margin " << margin << "x)";
  return os.str();
}

CflReport cfl_check(const NudgingParams& p, double dt) {
  const double bound = 2.0 / dt;
  const double margin =
      p.mu > 0.0 ? bound / p.mu : std::numeric_limits<double>::infinity();
  CflStatus status = CflStatus::pass;
  if (std::abs(p.mu - bound) <= 1e-12 * bound)
    status = CflStatus::boundary;
  else if (p.mu > bound)
    status = CflStatus::unstable;
  return {status, bound, margin};
}

void nudged_step(const ForwardModel& model, ModelState& v, const SpectralField& obs,
                 const NudgingParams& p) {
  if (p.mu == 0.0) {
    model.step(v);
    return;
  }
  SpectralField increment = obs - v.field;
  project_in_place(increment, p.projector, Part::observed);
  increment *= p.mu;
  model.advance(v);
  model.add_explicit_increment(v.field, increment);
  check_divergence(v);
}

}  // namespace cda
