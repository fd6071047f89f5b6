#include "cda/model.hpp"

#include "cda/errors.hpp"

namespace cda {

void check_divergence(const ModelState& state, int member) {
  const double m = state.field.max_abs();
  if (!(m <= kBlowUpThreshold)) throw BlowUpError(state.time, m, member);
}

}  // namespace cda
