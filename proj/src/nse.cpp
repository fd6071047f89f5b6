#include "cda/nse.hpp"

#include <cmath>
#include <numbers>

#include "cda/errors.hpp"

namespace cda {

void NseParams::validate() const {
  if (!(nu > 0.0)) throw ConfigError("nse: nu must be positive");
  if (!(dt > 0.0)) throw ConfigError("nse: dt must be positive");
  if (!std::isfinite(f0)) throw ConfigError("nse: f0 must be finite");
  const WaveGrid g = WaveGrid::square(n, 2.0 * std::numbers::pi);
  if (std::abs(k_f[0]) > g.dealias_cutoff() || std::abs(k_f[1]) > g.dealias_cutoff())
    throw ConfigError("nse: forcing wavevector k_f lies above the dealiasing cutoff");
}

double NseParams::forcing_amplitude() const {
  if (forcing_scaling == ForcingScaling::unit) return f0;
  const double h = 2.0 * std::numbers::pi / n;
  return f0 * h * h;
}

Etdrk4Coefficients Etdrk4Coefficients::build(const std::vector<double>& symbol, double dt,
                                             int contour_points) {
  Etdrk4Coefficients c;
  const std::size_t n = symbol.size();
  c.e.resize(n);
  c.e2.resize(n);
  c.q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);
  std::vector<Complex> roots(contour_points);
  for (int j = 0; j < contour_points; ++j)
    roots[j] = std::exp(Complex(0.0, std::numbers::pi * (j + 0.5) * 2.0 / contour_points));
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = symbol[i] * dt;
    c.e[i] = std::exp(z0);
    c.e2[i] = std::exp(0.5 * z0);
    Complex q{}, f1{}, f2{}, f3{};
    for (const Complex& r : roots) {
      const Complex z = z0 + r;
      const Complex ez = std::exp(z);
      const Complex z3 = z * z * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
      f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    const double inv = dt / contour_points;
    c.q[i] = (q * inv).real();
    c.f1[i] = (f1 * inv).real();
    c.f2[i] = (f2 * inv).real();
    c.f3[i] = (f3 * inv).real();
  }
  return c;
}

NseSolver::NseSolver(const NseParams& params)
    : params_(params),
      grid_((params.validate(),
             WaveGrid::square(params.n, 2.0 * std::numbers::pi, -std::numbers::pi))),
      forcing_(grid_) {
  const std::size_t size = grid_.size();
  kx_.resize(size);
  ky_.resize(size);
  k2_.resize(size);
  std::vector<double> symbol(size);
  int k1 = 0, k2 = 0;
  for (std::size_t i = 0; i < size; ++i) {
    grid_.wavevector(i, k1, k2);
    // Nyquist rows/columns are always dealiased; keep their derivatives real.
    kx_[i] = 2 * std::abs(k1) == grid_.n() ? 0.0 : grid_.physical_wavenumber(k1);
    ky_[i] = 2 * std::abs(k2) == grid_.n() ? 0.0 : grid_.physical_wavenumber(k2);
    const double a = grid_.physical_wavenumber(k1), b = grid_.physical_wavenumber(k2);
    k2_[i] = a * a + b * b;
    symbol[i] = -params_.nu * k2_[i];
  }
  coef_ = Etdrk4Coefficients::build(symbol, params_.dt);

  const double a = params_.k_f[0], b = params_.k_f[1], amp = params_.forcing_amplitude();
  const auto f = sample(grid_, [=](double x, double y) { return amp * std::cos(a * x + b * y); });
  forcing_ = to_spectral(grid_, f);
  dealias_in_place(forcing_);
  forcing_[0] = 0.0;
}

ModelState NseSolver::initial_state() const { return ModelState{SpectralField(grid_)}; }

DerivedFields NseSolver::derived_fields(const SpectralField& psi) const {
  DerivedFields d{SpectralField(grid_), SpectralField(grid_), SpectralField(grid_)};
  for (std::size_t i = 0; i < psi.size(); ++i) {
    d.u1[i] = Complex(0.0, ky_[i]) * psi[i];
    d.u2[i] = Complex(0.0, -kx_[i]) * psi[i];
    d.omega[i] = k2_[i] * psi[i];
  }
  return d;
}

SpectralField NseSolver::advection(const SpectralField& psi) const {
  const auto& fft = FourierTransform::for_grid(grid_);
  const std::size_t size = grid_.size();
  SpectralField tmp(grid_);
  std::vector<double> u1(size), u2(size), wx(size), wy(size);
  for (std::size_t i = 0; i < size; ++i) tmp[i] = Complex(0.0, ky_[i]) * psi[i];
  fft.inverse(tmp, u1);
  for (std::size_t i = 0; i < size; ++i) tmp[i] = Complex(0.0, -kx_[i]) * psi[i];
  fft.inverse(tmp, u2);
  for (std::size_t i = 0; i < size; ++i) tmp[i] = Complex(0.0, kx_[i] * k2_[i]) * psi[i];
  fft.inverse(tmp, wx);
  for (std::size_t i = 0; i < size; ++i) tmp[i] = Complex(0.0, ky_[i] * k2_[i]) * psi[i];
  fft.inverse(tmp, wy);
  for (std::size_t j = 0; j < size; ++j) u1[j] = u1[j] * wx[j] + u2[j] * wy[j];
  fft.forward(u1, tmp);
  dealias_in_place(tmp);
  return tmp;
}

SpectralField NseSolver::nonlinear(const SpectralField& psi) const {
  if (!params_.nonlinear) return forcing_;
  SpectralField out = advection(psi);
  // -Lap^-1 is multiplication by 1/|k|^2, zero on the mean mode.
  out[0] = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[i] / k2_[i] + forcing_[i];
  return out;
}

void NseSolver::advance(ModelState& state) const {
  const auto& c = coef_;
  SpectralField& v = state.field;
  const std::size_t size = v.size();
  const SpectralField nv = nonlinear(v);
  SpectralField a(grid_);
  for (std::size_t i = 0; i < size; ++i) a[i] = c.e2[i] * v[i] + c.q[i] * nv[i];
  const SpectralField na = nonlinear(a);
  SpectralField b(grid_);
  for (std::size_t i = 0; i < size; ++i) b[i] = c.e2[i] * v[i] + c.q[i] * na[i];
  const SpectralField nb = nonlinear(b);
  SpectralField cc(grid_);
  for (std::size_t i = 0; i < size; ++i) cc[i] = c.e2[i] * a[i] + c.q[i] * (2.0 * nb[i] - nv[i]);
  const SpectralField nc = nonlinear(cc);
  for (std::size_t i = 0; i < size; ++i)
    v[i] = c.e[i] * v[i] + c.f1[i] * nv[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) + c.f3[i] * nc[i];
  v[0] = 0.0;
  dealias_in_place(v);
  tick(state);
}

void NseSolver::add_explicit_increment(SpectralField& next, const SpectralField& increment) const {
  next.axpy(params_.dt, increment);
}

double NseSolver::kinetic_energy(const SpectralField& psi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += k2_[i] * std::norm(psi[i]);
  return 0.5 * grid_.measure() * s;
}

double compute_grashof(const NseParams& params) {
  return std::abs(params.f0) / (params.nu * params.nu);  // lambda_1 = 1
}

}  // namespace cda
