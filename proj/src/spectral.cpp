#include "cda/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "cda/errors.hpp"

namespace cda {

// ---------------------------------------------------------------------------
// WaveGrid

WaveGrid::WaveGrid(int dims, int n, double length, double origin)
    : dims_(dims), n_(n), length_(length), origin_(origin) {
  if (dims != 1 && dims != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (n < 4 || (n & (n - 1)) != 0)
    throw ConfigError("grid size N must be a power of two >= 4, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("domain length must be positive");
}

double WaveGrid::measure() const { return dims_ == 1 ? length_ : length_ * length_; }

double WaveGrid::physical_wavenumber(int k) const {
  return 2.0 * std::numbers::pi * k / length_;
}

std::size_t WaveGrid::flat_index(int k1, int k2) const {
  if (dims_ == 1) return index_of(k1);
  return std::size_t(index_of(k1)) * n_ + index_of(k2);
}

void WaveGrid::wavevector(std::size_t flat, int& k1, int& k2) const {
  if (dims_ == 1) {
    k1 = wavenumber(int(flat));
    k2 = 0;
  } else {
    k1 = wavenumber(int(flat / n_));
    k2 = wavenumber(int(flat % n_));
  }
}

std::size_t WaveGrid::mirror(std::size_t flat) const {
  if (dims_ == 1) return (n_ - flat) % n_;
  const std::size_t i = flat / n_, j = flat % n_;
  return ((n_ - i) % n_) * n_ + (n_ - j) % n_;
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(const WaveGrid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ConfigError("field grids differ");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ConfigError("field grids differ");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ConfigError("field grids differ");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), Complex{}); }

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double SpectralField::hermitian_defect() const {
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    m = std::max(m, std::abs(coeffs_[grid_.mirror(i)] - std::conj(coeffs_[i])));
  return m;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

std::vector<LatticeMode> resolved_half_lattice(const WaveGrid& grid) {
  std::vector<LatticeMode> modes;
  const int c = grid.dealias_cutoff();
  const int c2 = grid.dims() == 2 ? c : 0;
  for (int k1 = 0; k1 <= c; ++k1) {
    for (int k2 = -c2; k2 <= c2; ++k2) {
      if (k1 == 0 && k2 < 0) continue;
      const std::size_t idx = grid.flat_index(k1, k2);
      modes.push_back({idx, grid.mirror(idx), k1, k2});
    }
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Transforms

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FourierTransform::FourierTransform(int dims, int n) : dims_(dims), n_(n) {
  real_size_ = dims == 1 ? std::size_t(n) : std::size_t(n) * n;
  half_size_ = dims == 1 ? std::size_t(n / 2 + 1) : std::size_t(n) * (n / 2 + 1);
  // FFTW_ESTIMATE picks the algorithm deterministically, which keeps runs
  // bitwise reproducible.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> r(real_size_);
  std::vector<Complex> h(half_size_), f(real_size_);
  std::lock_guard lock(planner_mutex());
  if (dims == 1) {
    plan_r2c_ = fftw_plan_dft_r2c_1d(n, r.data(), as_fftw(h.data()), flags);
    plan_c2r_ = fftw_plan_dft_c2r_1d(n, as_fftw(h.data()), r.data(), flags);
    plan_c2c_inv_ = fftw_plan_dft_1d(n, as_fftw(f.data()), as_fftw(f.data()), FFTW_BACKWARD, flags);
  } else {
    plan_r2c_ = fftw_plan_dft_r2c_2d(n, n, r.data(), as_fftw(h.data()), flags);
    plan_c2r_ = fftw_plan_dft_c2r_2d(n, n, as_fftw(h.data()), r.data(), flags);
    plan_c2c_inv_ =
        fftw_plan_dft_2d(n, n, as_fftw(f.data()), as_fftw(f.data()), FFTW_BACKWARD, flags);
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2c_inv_));
}

const FourierTransform& FourierTransform::for_grid(const WaveGrid& grid) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<FourierTransform>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{grid.dims(), grid.n()}];
  if (!slot) slot.reset(new FourierTransform(grid.dims(), grid.n()));
  return *slot;
}

void FourierTransform::forward(std::span<const double> values, SpectralField& out) const {
  if (values.size() != real_size_ || out.size() != real_size_ || out.grid().n() != n_ ||
      out.grid().dims() != dims_)
    throw ConfigError("transform: array size does not match grid");
  thread_local std::vector<Complex> half;
  half.resize(half_size_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(values.data()),
                       as_fftw(half.data()));
  const double scale = 1.0 / double(real_size_);
  auto full = out.coeffs();
  if (dims_ == 1) {
    for (int k = 0; k <= n_ / 2; ++k) full[k] = half[k] * scale;
    for (int k = n_ / 2 + 1; k < n_; ++k) full[k] = std::conj(half[n_ - k]) * scale;
    return;
  }
  const int hw = n_ / 2 + 1;
  for (int i = 0; i < n_; ++i) {
    const int mi = (n_ - i) % n_;
    for (int j = 0; j < hw; ++j) full[std::size_t(i) * n_ + j] = half[std::size_t(i) * hw + j] * scale;
    for (int j = hw; j < n_; ++j)
      full[std::size_t(i) * n_ + j] = std::conj(half[std::size_t(mi) * hw + (n_ - j)]) * scale;
  }
}

void FourierTransform::inverse(const SpectralField& field, std::span<double> out) const {
  if (out.size() != real_size_ || field.size() != real_size_ || field.grid().n() != n_ ||
      field.grid().dims() != dims_)
    throw ConfigError("transform: array size does not match grid");
  thread_local std::vector<Complex> half;
  half.resize(half_size_);
  auto full = field.coeffs();
  if (dims_ == 1) {
    for (int k = 0; k <= n_ / 2; ++k) half[k] = full[k];
  } else {
    const int hw = n_ / 2 + 1;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < hw; ++j) half[std::size_t(i) * hw + j] = full[std::size_t(i) * n_ + j];
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), as_fftw(half.data()), out.data());
}

std::vector<Complex> FourierTransform::inverse_complex(const SpectralField& field) const {
  if (field.size() != real_size_) throw ConfigError("transform: array size does not match grid");
  std::vector<Complex> buf(field.coeffs().begin(), field.coeffs().end());
  fftw_execute_dft(static_cast<fftw_plan>(plan_c2c_inv_), as_fftw(buf.data()), as_fftw(buf.data()));
  return buf;
}

SpectralField to_spectral(const WaveGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    throw ConfigError("physical array has " + std::to_string(values.size()) +
                      " samples, grid expects " + std::to_string(grid.size()));
  SpectralField out(grid);
  FourierTransform::for_grid(grid).forward(values, out);
  return out;
}

std::vector<double> to_physical(const SpectralField& field) {
  std::vector<double> out(field.size());
  FourierTransform::for_grid(field.grid()).inverse(field, out);
  return out;
}

// ---------------------------------------------------------------------------
// Dealiasing and projections

void dealias_in_place(SpectralField& field) {
  const WaveGrid& g = field.grid();
  const int c = g.dealias_cutoff();
  const int n = g.n();
  if (g.dims() == 1) {
    for (int i = 0; i < n; ++i)
      if (std::abs(g.wavenumber(i)) > c) field[i] = 0.0;
    return;
  }
  for (int i = 0; i < n; ++i) {
    const bool row_out = std::abs(g.wavenumber(i)) > c;
    for (int j = 0; j < n; ++j)
      if (row_out || std::abs(g.wavenumber(j)) > c) field[std::size_t(i) * n + j] = 0.0;
  }
}

SpectralField dealias_23(SpectralField field) {
  dealias_in_place(field);
  return field;
}

void Projector::validate(const WaveGrid& grid) const {
  if (cutoff < 0) throw ConfigError("observed-mode cutoff M must be non-negative");
  if (cutoff > grid.dealias_cutoff())
    throw ConfigError("observed-mode cutoff M=" + std::to_string(cutoff) +
                      " exceeds the dealiasing cutoff " + std::to_string(grid.dealias_cutoff()));
}

void project_in_place(SpectralField& field, const Projector& p, Part part) {
  if (part == Part::all) return;
  const WaveGrid& g = field.grid();
  const bool keep_observed = part == Part::observed;
  int k1 = 0, k2 = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    g.wavevector(i, k1, k2);
    if (p.observes(k1, k2) != keep_observed) field[i] = 0.0;
  }
}

SpectralField project(const SpectralField& field, const Projector& p, Part part) {
  SpectralField out = field;
  project_in_place(out, p, part);
  return out;
}

std::vector<LatticeMode> observed_modes(const WaveGrid& grid, const Projector& p) {
  std::vector<LatticeMode> modes;
  const int m = p.cutoff;
  const int m2 = grid.dims() == 2 ? m : 0;
  for (int k1 = 0; k1 <= m; ++k1) {
    for (int k2 = -m2; k2 <= m2; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      if (!p.observes(k1, k2)) continue;
      const std::size_t idx = grid.flat_index(k1, k2);
      modes.push_back({idx, grid.mirror(idx), k1, k2});
    }
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Noise

void add_noise(SpectralField& field, const NoiseSpec& spec, RngStream& rng) {
  if (spec.variance < 0.0) throw ConfigError("noise variance must be non-negative");
  if (spec.variance == 0.0) return;
  const double sigma = std::sqrt(spec.variance);
  for (const auto& m : observed_modes(field.grid(), Projector{spec.cutoff})) {
    const double re = sigma * rng.next_normal();
    const double im = sigma * rng.next_normal();
    field[m.index] += Complex(re, im);
    field[m.mirror] += Complex(re, -im);
  }
}

SpectralField generate_noise(const WaveGrid& grid, const NoiseSpec& spec, RngStream& rng) {
  SpectralField out(grid);
  add_noise(out, spec, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Norms

double l2_norm(const SpectralField& field, Part part, const Projector& p) {
  const WaveGrid& g = field.grid();
  double sum = 0.0;
  if (part == Part::all) {
    for (const auto& c : field.coeffs()) sum += std::norm(c);
  } else {
    const bool want_observed = part == Part::observed;
    int k1 = 0, k2 = 0;
    for (std::size_t i = 0; i < field.size(); ++i) {
      g.wavevector(i, k1, k2);
      if (p.observes(k1, k2) == want_observed) sum += std::norm(field[i]);
    }
  }
  return std::sqrt(g.measure() * sum);
}

double quadrature_l2_norm(const WaveGrid& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum * grid.measure() / double(grid.size()));
}

std::vector<SpectrumBin> energy_spectrum(const SpectralField& field) {
  const WaveGrid& g = field.grid();
  const int shells = g.dims() == 1 ? g.n() / 2 + 1
                                   : int(std::ceil(std::sqrt(2.0) * (g.n() / 2))) + 1;
  std::vector<SpectrumBin> bins(shells);
  for (int s = 0; s < shells; ++s) bins[s] = {s, 0.0};
  int k1 = 0, k2 = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    g.wavevector(i, k1, k2);
    const int shell = g.dims() == 1 ? std::abs(k1)
                                    : int(std::lround(std::sqrt(double(k1) * k1 + double(k2) * k2)));
    bins[shell].energy += g.measure() * std::norm(field[i]);
  }
  return bins;
}

}  // namespace cda
