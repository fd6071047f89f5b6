#pragma once

#include <stdexcept>
#include <string>

namespace cda {

/// Invalid configuration or mismatched inputs.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Base class for failures of the numerics (as opposed to bad input).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A state exceeded the divergence guard. `member` is -1 unless the state
/// belongs to an ensemble.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(double time, double max_abs, int member = -1);

  double time() const { return time_; }
  double max_abs() const { return max_abs_; }
  int member() const { return member_; }

 private:
  double time_;
  double max_abs_;
  int member_;
};

/// The innovation covariance of the ensemble is singular or too badly
/// conditioned to invert.
class GainDegeneracyError : public NumericalError {
 public:
  explicit GainDegeneracyError(double condition_estimate);

  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

}  // namespace cda
