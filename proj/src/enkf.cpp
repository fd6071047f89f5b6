#include "cda/enkf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cda/errors.hpp"

namespace cda {

void EnkfParams::validate(const WaveGrid& grid) const {
  if (members < 2) throw ConfigError("enkf: ensemble size K must be at least 2");
  if (!(sigma_E2 >= 0.0)) throw ConfigError("enkf: sigma_E2 must be non-negative");
  if (!(sigma_I2 >= 0.0)) throw ConfigError("enkf: sigma_I2 must be non-negative");
  if (!(condition_limit > 1.0)) throw ConfigError("enkf: condition_limit must exceed 1");
  projector.validate(grid);
  if (projector.cutoff < 1) throw ConfigError("enkf: at least one mode must be observed");
}

int EnkfParams::recommended_members(const WaveGrid& grid) const {
  return 2 * int(observed_modes(grid, projector).size());
}

namespace {

/// G = V U^* (U U^*)^-1 via an eigendecomposition of U U^*, which also gives
/// the condition number. Returns an empty matrix when it is not finite.
template <class Matrix>
Matrix solve_gain(const Matrix& V, const Matrix& U, double& condition) {
  const Matrix C = U * U.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff(), lmin = lambda.minCoeff();
  condition = (lmin > 0.0 && lmax > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!std::isfinite(condition)) return Matrix();
  const Matrix& Q = eig.eigenvectors();
  const Matrix Cinv = Q * lambda.cwiseInverse().asDiagonal() * Q.adjoint();
  return (V * U.adjoint()) * Cinv;
}

}  // namespace

SpectralField ensemble_mean_state(const Ensemble& ens) {
  if (ens.members.empty()) throw ConfigError("ensemble is empty");
  SpectralField mean(ens.members.front().field.grid());
  for (const auto& m : ens.members) mean += m.field;
  mean *= 1.0 / double(ens.members.size());
  return mean;
}

Eigen::MatrixXcd GainOperator::increments(const Eigen::MatrixXcd& D) const {
  if (form == GainForm::complex) return matrix * D;
  const Eigen::Index no = D.rows(), ns = real_matrix.rows() / 2;
  Eigen::MatrixXd Dr(2 * no, D.cols());
  Dr << D.real(), D.imag();
  const Eigen::MatrixXd Xr = real_matrix * Dr;
  Eigen::MatrixXcd out(ns, D.cols());
  out.real() = Xr.topRows(ns);
  out.imag() = Xr.bottomRows(ns);
  return out;
}

SpectralField GainOperator::apply(const SpectralField& innovation) const {
  Eigen::MatrixXcd d(obs_modes.size(), 1);
  for (std::size_t j = 0; j < obs_modes.size(); ++j) d(j, 0) = innovation[obs_modes[j].index];
  const Eigen::VectorXcd inc = increments(d).col(0);
  SpectralField out(innovation.grid());
  for (std::size_t i = 0; i < state_modes.size(); ++i) {
    const auto& m = state_modes[i];
    if (m.index == m.mirror) {
      out[m.index] = inc[i].real();
    } else {
      out[m.index] = inc[i];
      out[m.mirror] = std::conj(inc[i]);
    }
  }
  return out;
}

EnsembleKalmanFilter::EnsembleKalmanFilter(const ForwardModel& model, const EnkfParams& params,
                                           std::uint64_t seed, Exec exec)
    : model_(model), params_(params), exec_(exec) {
  params_.validate(model.grid());
  state_modes_ = resolved_half_lattice(model.grid());
  obs_modes_ = observed_modes(model.grid(), params_.projector);
  for (int k = 0; k < params_.members; ++k) {
    perturbation_rng_.push_back(RngStream::named(seed, "member-perturbation", k));
    inflation_rng_.push_back(RngStream::named(seed, "inflation", k));
  }
}

Ensemble EnsembleKalmanFilter::init_ensemble(const SpectralField& obs0) {
  Ensemble ens;
  ens.phase = EnsemblePhase::forecast;
  ens.members.resize(params_.members, ModelState{obs0});
  const NoiseSpec spec{params_.sigma_E2, params_.projector.cutoff};
  for_each_index(exec_, params_.members, [&](int k) {
    add_noise(ens.members[k].field, spec, perturbation_rng_[k]);
  });
  return ens;
}

GainOperator EnsembleKalmanFilter::assemble_gain(
    const Ensemble& ens, std::span<const SpectralField> perturbations) const {
  const int K = ens.size();
  if (int(perturbations.size()) != K)
    throw ConfigError("enkf: need one observation perturbation per member");
  const Eigen::Index ns = Eigen::Index(state_modes_.size());
  const Eigen::Index no = Eigen::Index(obs_modes_.size());

  Eigen::MatrixXcd X(ns, K), Y(no, K);
  for_each_index(exec_, K, [&](int k) {
    const auto& f = ens.members[k].field;
    for (Eigen::Index i = 0; i < ns; ++i) X(i, k) = f[state_modes_[i].index];
    for (Eigen::Index j = 0; j < no; ++j)
      Y(j, k) = f[obs_modes_[j].index] - perturbations[k][obs_modes_[j].index];
  });

  // Anomalies; Y already holds H v - u_err, so its mean is vbar^H - ubar^err.
  const double scale = 1.0 / std::sqrt(double(K - 1));
  const Eigen::VectorXcd xbar = X.rowwise().mean();
  const Eigen::VectorXcd ybar = Y.rowwise().mean();
  const Eigen::MatrixXcd V = (X.colwise() - xbar) * scale;
  const Eigen::MatrixXcd U = (Y.colwise() - ybar) * scale;

  GainOperator g;
  g.form = params_.form;
  double condition = 0.0;
  if (params_.form == GainForm::complex) {
    g.matrix = solve_gain(V, U, condition);
  } else {
    // Re and Im as separate real coordinates.
    Eigen::MatrixXd Vr(2 * ns, K), Ur(2 * no, K);
    Vr << V.real(), V.imag();
    Ur << U.real(), U.imag();
    g.real_matrix = solve_gain(Vr, Ur, condition);
  }
  g.condition = condition;
  if (!(condition <= params_.condition_limit)) throw GainDegeneracyError(condition);
  g.state_modes = state_modes_;
  g.obs_modes = obs_modes_;
  return g;
}

void EnsembleKalmanFilter::analysis_step(Ensemble& ens, const SpectralField& obs) {
  const int K = ens.size();
  std::vector<SpectralField> perturbations(K, SpectralField(model_.grid()));
  const NoiseSpec spec{params_.sigma_E2, params_.projector.cutoff};
  for_each_index(exec_, K, [&](int k) {
    add_noise(perturbations[k], spec, perturbation_rng_[k]);
  });
  analysis_step(ens, obs, perturbations);
}

void EnsembleKalmanFilter::analysis_step(Ensemble& ens, const SpectralField& obs,
                                         std::span<const SpectralField> perturbations) {
  if (ens.phase != EnsemblePhase::forecast)
    throw ConfigError("enkf: analysis requires a forecast-phase ensemble");
  gain_ = assemble_gain(ens, perturbations);

  const int K = ens.size();
  const Eigen::Index no = Eigen::Index(obs_modes_.size());
  Eigen::MatrixXcd D(no, K);
  for (int k = 0; k < K; ++k)
    for (Eigen::Index j = 0; j < no; ++j) {
      const std::size_t idx = obs_modes_[j].index;
      D(j, k) = obs[idx] - ens.members[k].field[idx];
    }
  const Eigen::MatrixXcd increments = gain_.increments(D);

  for_each_index(exec_, K, [&](int k) {
    auto& f = ens.members[k].field;
    for (std::size_t i = 0; i < state_modes_.size(); ++i) {
      const auto& m = state_modes_[i];
      const Complex inc = increments(Eigen::Index(i), k);
      if (m.index == m.mirror) {
        f[m.index] += inc.real();
      } else {
        f[m.index] += inc;
        f[m.mirror] = std::conj(f[m.index]);
      }
    }
  });
  ens.phase = EnsemblePhase::analysis;
}

void EnsembleKalmanFilter::forecast(Ensemble& ens) {
  if (ens.phase != EnsemblePhase::analysis)
    throw ConfigError("enkf: forecast requires an analysis-phase ensemble");
  for_each_index(exec_, ens.size(), [&](int k) {
    auto& m = ens.members[k];
    model_.advance(m);
    check_divergence(m, k);
  });
  ens.phase = EnsemblePhase::forecast;
}

void EnsembleKalmanFilter::inflate(Ensemble& ens) {
  if (ens.phase != EnsemblePhase::forecast)
    throw ConfigError("enkf: inflation requires a forecast-phase ensemble");
  const NoiseSpec spec{params_.sigma_I2, params_.projector.cutoff};
  for_each_index(exec_, ens.size(), [&](int k) {
    add_noise(ens.members[k].field, spec, inflation_rng_[k]);
  });
}

void EnsembleKalmanFilter::forecast_and_inflate(Ensemble& ens) {
  forecast(ens);
  inflate(ens);
}

}  // namespace cda
