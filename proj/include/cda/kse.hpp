#pragma once

#include <numbers>
#include <vector>

#include "cda/model.hpp"

namespace cda {

struct KseParams {
  double lambda = 0.5;
  double domain_length = 32.0 * std::numbers::pi;
  int n = 256;
  double dt = 0.01;
  /// Testing switch: drop -u u_x and step the linear equation only.
  bool nonlinear = true;

  void validate() const;
};

using KseState = ModelState;

/// L(k) = -k^4 + lambda k^2 in physical wavenumbers k = 2 pi j / length.
std::vector<double> kse_linear_symbol(const WaveGrid& grid, double lambda);

/// u_t = -u_xxxx - lambda u_xx - u u_x on a periodic interval, stepped with
/// the integrating-factor explicit Euler scheme
///   u_{n+1} = e^{L dt} (u_n + dt N(u_n)).
class KseSolver final : public ForwardModel {
 public:
  explicit KseSolver(const KseParams& params);

  const WaveGrid& grid() const override { return grid_; }
  double dt() const override { return params_.dt; }
  std::string name() const override { return "kse"; }
  const KseParams& params() const { return params_; }

  /// cos(x/16)(1 + sin(x/16)) on [0, 32 pi), i.e. wavenumber one of the
  /// domain in general.
  ModelState initial_state() const override;

  /// Dealiased transform of -u u_x.
  SpectralField nonlinear(const SpectralField& u) const;

  void advance(ModelState& state) const override;
  void add_explicit_increment(SpectralField& next, const SpectralField& increment) const override;

  const std::vector<double>& integrating_factor() const { return factor_; }

 private:
  KseParams params_;
  WaveGrid grid_;
  std::vector<double> ik_;      // physical wavenumber per flat index
  std::vector<double> factor_;  // e^{L dt}
};

}  // namespace cda
