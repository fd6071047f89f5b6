#include "cda/errors.hpp"

#include <sstream>

namespace cda {

namespace {

std::string blow_up_message(double time, double max_abs, int member) {
  std::ostringstream os;
  os << "divergence guard tripped at t=" << time << " (max |coeff| = " << max_abs << ")";
  if (member >= 0) os << " in ensemble member " << member;
  return os.str();
}

}  // namespace

BlowUpError::BlowUpError(double time, double max_abs, int member)
    : NumericalError(blow_up_message(time, max_abs, member)),
      time_(time),
      max_abs_(max_abs),
      member_(member) {}

GainDegeneracyError::GainDegeneracyError(double condition_estimate)
    : NumericalError("Kalman gain is degenerate: innovation covariance condition estimate " +
                     std::to_string(condition_estimate)),
      condition_(condition_estimate) {}

}  // namespace cda
