#include "cda/kse.hpp"

#include <cmath>

#include "cda/errors.hpp"

namespace cda {

void KseParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("kse: dt must be positive");
  if (!(lambda > 0.0)) throw ConfigError("kse: lambda must be positive");
  if (!(domain_length > 0.0)) throw ConfigError("kse: domain_length must be positive");
}

std::vector<double> kse_linear_symbol(const WaveGrid& grid, double lambda) {
  std::vector<double> symbol(grid.size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    const double k = grid.physical_wavenumber(grid.wavenumber(int(i)));
    const double k2 = k * k;
    symbol[i] = -k2 * k2 + lambda * k2;
  }
  return symbol;
}

KseSolver::KseSolver(const KseParams& params)
    : params_(params), grid_((params.validate(), WaveGrid::line(params.n, params.domain_length))) {
  const auto symbol = kse_linear_symbol(grid_, params_.lambda);
  ik_.resize(grid_.size());
  factor_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const int k = grid_.wavenumber(int(i));
    // The Nyquist mode has no real derivative; it is dealiased anyway.
    ik_[i] = 2 * std::abs(k) == grid_.n() ? 0.0 : grid_.physical_wavenumber(k);
    factor_[i] = std::exp(symbol[i] * params_.dt);
  }
}

ModelState KseSolver::initial_state() const {
  const double w = 2.0 * std::numbers::pi / grid_.length();
  const auto u0 = sample(grid_, [w](double x, double) {
    return std::cos(w * x) * (1.0 + std::sin(w * x));
  });
  ModelState s{to_spectral(grid_, u0)};
  dealias_in_place(s.field);
  return s;
}

SpectralField KseSolver::nonlinear(const SpectralField& u) const {
  const auto& fft = FourierTransform::for_grid(grid_);
  SpectralField ux(grid_);
  for (std::size_t i = 0; i < u.size(); ++i) ux[i] = Complex(0.0, ik_[i]) * u[i];
  std::vector<double> up(grid_.size()), uxp(grid_.size());
  fft.inverse(u, up);
  fft.inverse(ux, uxp);
  for (std::size_t j = 0; j < up.size(); ++j) up[j] = -up[j] * uxp[j];
  SpectralField out(grid_);
  fft.forward(up, out);
  dealias_in_place(out);
  return out;
}

void KseSolver::advance(ModelState& state) const {
  auto& c = state.field;
  if (params_.nonlinear) {
    const SpectralField nl = nonlinear(c);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = factor_[i] * (c[i] + params_.dt * nl[i]);
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= factor_[i];
  }
  tick(state);
}

void KseSolver::add_explicit_increment(SpectralField& next, const SpectralField& increment) const {
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += params_.dt * factor_[i] * increment[i];
}

}  // namespace cda
