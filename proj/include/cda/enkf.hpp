#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "cda/model.hpp"
#include "cda/parallel.hpp"

namespace cda {

/// How observed coefficients enter the gain.
enum class GainForm {
  real,     ///< Re and Im of each observed mode are separate real coordinates
  complex,  ///< each observed mode is one complex coordinate (complex-linear gain)
};

struct EnkfParams {
  int members = 32;
  double sigma_E2 = 1e-16;  ///< variance of the per-member observation perturbations
  double sigma_I2 = 1e-14;  ///< variance of the additive inflation noise
  Projector projector;      ///< H = P_M
  /// Largest accepted condition number of the innovation covariance.
  double condition_limit = 1e12;
  GainForm form = GainForm::complex;

  void validate(const WaveGrid& grid) const;
  /// Advisory lower bound on K: twice the number of independent observed modes.
  int recommended_members(const WaveGrid& grid) const;
};

enum class EnsemblePhase { forecast, analysis };

struct Ensemble {
  std::vector<ModelState> members;
  EnsemblePhase phase = EnsemblePhase::forecast;

  double time() const { return members.empty() ? 0.0 : members.front().time; }
  int size() const { return int(members.size()); }
};

/// Coefficient-wise arithmetic mean of the members.
SpectralField ensemble_mean_state(const Ensemble& ens);

/// Kalman gain acting on the independent half lattice. Rows are the resolved
/// state modes (mean mode first), columns the observed modes. The real form
/// stacks all real parts above all imaginary parts on both sides.
struct GainOperator {
  GainForm form = GainForm::complex;
  Eigen::MatrixXcd matrix;     ///< complex form: state x obs
  Eigen::MatrixXd real_matrix; ///< real form: [Re; Im] state x [Re; Im] obs
  std::vector<LatticeMode> state_modes;
  std::vector<LatticeMode> obs_modes;
  double condition = 0.0;

  /// Half-lattice state increments for innovation columns on observed modes.
  Eigen::MatrixXcd increments(const Eigen::MatrixXcd& innovations) const;

  /// Hermitian state increment for an innovation supported on observed modes.
  SpectralField apply(const SpectralField& innovation) const;
};

/// Stochastic (perturbed-observation) EnKF with additive inflation.
///
/// Each member owns two counter-based noise streams ("member-perturbation"
/// and "inflation", indexed by member), so forecasts can run in parallel and
/// the result does not depend on the execution order.
class EnsembleKalmanFilter {
 public:
  EnsembleKalmanFilter(const ForwardModel& model, const EnkfParams& params,
                       std::uint64_t seed, Exec exec = Exec::parallel);

  const EnkfParams& params() const { return params_; }
  int obs_modes() const { return int(obs_modes_.size()); }

  /// K forecast members, each obs0 plus an independent perturbation of
  /// variance sigma_E2 on the observed modes.
  Ensemble init_ensemble(const SpectralField& obs0);

  /// Draws the observation perturbations and performs the analysis update.
  /// Throws GainDegeneracyError if the innovation covariance is singular.
  void analysis_step(Ensemble& ens, const SpectralField& obs);
  /// Analysis with caller-supplied perturbations (one field per member).
  void analysis_step(Ensemble& ens, const SpectralField& obs,
                     std::span<const SpectralField> perturbations);

  /// Advances every member one step, then adds inflation noise. A member
  /// that blows up is reported through BlowUpError::member().
  void forecast_and_inflate(Ensemble& ens);

  /// The two halves of forecast_and_inflate. Error metrics are taken between them.
  void forecast(Ensemble& ens);
  void inflate(Ensemble& ens);

  const GainOperator& last_gain() const { return gain_; }

  /// Assembles the gain from forecast members and perturbations.
  GainOperator assemble_gain(const Ensemble& ens,
                             std::span<const SpectralField> perturbations) const;

 private:
  const ForwardModel& model_;
  EnkfParams params_;
  Exec exec_;
  std::vector<LatticeMode> state_modes_;
  std::vector<LatticeMode> obs_modes_;
  std::vector<RngStream> perturbation_rng_;
  std::vector<RngStream> inflation_rng_;
  GainOperator gain_;
};

}  // namespace cda
