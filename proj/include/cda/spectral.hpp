#pragma once

// Fourier-space representation of real periodic fields on 1D and 2D square
// lattices, with the transforms, projections, noise and norms shared by the
// solvers and both assimilation methods.
//
// Coefficient convention: u(x) = sum_k c_k exp(i k_phys (x - x0)), with
// c_k = N^-d sum_j u_j exp(-i k_phys (x_j - x0)) and k_phys = 2 pi k / length.
// Coefficients are stored on the full lattice in FFT order (index j holds
// wavenumber j for j <= N/2 and j - N above). In 2D the storage is row-major
// with the first index along x.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cda/rng.hpp"

namespace cda {

using Complex = std::complex<double>;

class WaveGrid {
 public:
  /// Throws ConfigError unless n is a power of two >= 4 and length > 0.
  WaveGrid(int dims, int n, double length, double origin = 0.0);

  static WaveGrid line(int n, double length, double origin = 0.0) {
    return WaveGrid(1, n, length, origin);
  }
  static WaveGrid square(int n, double length, double origin = 0.0) {
    return WaveGrid(2, n, length, origin);
  }

  int dims() const { return dims_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double origin() const { return origin_; }
  std::size_t size() const { return dims_ == 1 ? n_ : std::size_t(n_) * n_; }
  /// Lebesgue measure of the domain, length^dims.
  double measure() const;
  /// Physical coordinate of grid node i along any axis.
  double node(int i) const { return origin_ + length_ * i / n_; }

  int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }
  int index_of(int k) const { return k >= 0 ? k : k + n_; }
  double physical_wavenumber(int k) const;
  /// floor((2/3)(N/2)); modes with any |k_i| above it are removed.
  int dealias_cutoff() const { return (2 * (n_ / 2)) / 3; }

  std::size_t flat_index(int k1, int k2 = 0) const;
  /// Wavenumber pair of a flat index (k2 = 0 in 1D).
  void wavevector(std::size_t flat, int& k1, int& k2) const;
  std::size_t mirror(std::size_t flat) const;

  bool operator==(const WaveGrid&) const = default;

 private:
  int dims_;
  int n_;
  double length_;
  double origin_;
};

class SpectralField {
 public:
  explicit SpectralField(const WaveGrid& grid);

  const WaveGrid& grid() const { return grid_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  Complex& at(int k1, int k2 = 0) { return coeffs_[grid_.flat_index(k1, k2)]; }
  const Complex& at(int k1, int k2 = 0) const { return coeffs_[grid_.flat_index(k1, k2)]; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  void axpy(double s, const SpectralField& other);
  void set_zero();

  double max_abs() const;
  bool all_finite() const;
  /// max_k |c(-k) - conj(c(k))|
  double hermitian_defect() const;

 private:
  WaveGrid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// One entry of the independent (half) lattice: `index` and its conjugate
/// partner `mirror` (equal for the self-conjugate mean mode).
struct LatticeMode {
  std::size_t index;
  std::size_t mirror;
  int k1;
  int k2;
};

/// Representatives of conjugate pairs (k1 > 0, or k1 == 0 and k2 >= 0) with
/// |k_i| <= dealias cutoff, mean mode first, in a fixed order.
std::vector<LatticeMode> resolved_half_lattice(const WaveGrid& grid);

// ---------------------------------------------------------------------------
// Transforms

/// Cached FFTW plans for one lattice shape. Plans are created once under a
/// lock and executed through the new-array interface, so a single instance
/// is safe to share between threads.
class FourierTransform {
 public:
  static const FourierTransform& for_grid(const WaveGrid& grid);

  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  /// Real samples -> Hermitian coefficients (full lattice).
  void forward(std::span<const double> values, SpectralField& out) const;
  /// Hermitian coefficients -> real samples. Only the half lattice is read;
  /// the input is assumed Hermitian.
  void inverse(const SpectralField& field, std::span<double> out) const;
  /// Full complex inverse (no symmetry assumed); used for reality checks.
  std::vector<Complex> inverse_complex(const SpectralField& field) const;

 private:
  FourierTransform(int dims, int n);

  int dims_;
  int n_;
  std::size_t real_size_;
  std::size_t half_size_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
  void* plan_c2c_inv_ = nullptr;
};

/// Throws ConfigError if values.size() != grid.size().
SpectralField to_spectral(const WaveGrid& grid, std::span<const double> values);
std::vector<double> to_physical(const SpectralField& field);

/// Samples f at the grid nodes (f(x) in 1D, f(x, y) in 2D).
template <class F>
std::vector<double> sample(const WaveGrid& grid, F&& f) {
  std::vector<double> values(grid.size());
  if (grid.dims() == 1) {
    for (int i = 0; i < grid.n(); ++i) values[i] = f(grid.node(i), 0.0);
  } else {
    for (int i = 0; i < grid.n(); ++i)
      for (int j = 0; j < grid.n(); ++j)
        values[std::size_t(i) * grid.n() + j] = f(grid.node(i), grid.node(j));
  }
  return values;
}

// ---------------------------------------------------------------------------
// Dealiasing and projections

void dealias_in_place(SpectralField& field);
SpectralField dealias_23(SpectralField field);

/// Orthogonal projection onto the modes 1 <= |k| <= M (Euclidean norm of the
/// integer wavevector in 2D). The mean mode is never observed.
struct Projector {
  int cutoff = 0;

  bool observes(int k1, int k2 = 0) const {
    const long r2 = long(k1) * k1 + long(k2) * k2;
    return r2 >= 1 && r2 <= long(cutoff) * cutoff;
  }
  /// Throws ConfigError unless 0 <= M <= dealias cutoff of the grid.
  void validate(const WaveGrid& grid) const;
};

enum class Part { all, observed, complement };

SpectralField project(const SpectralField& field, const Projector& p, Part part);
void project_in_place(SpectralField& field, const Projector& p, Part part);

/// Observed representatives (half lattice), in a fixed order.
std::vector<LatticeMode> observed_modes(const WaveGrid& grid, const Projector& p);

// ---------------------------------------------------------------------------
// Noise

struct NoiseSpec {
  double variance = 0.0;  ///< sigma^2 of each of Re and Im
  int cutoff = 0;         ///< noise lives on 1 <= |k| <= cutoff
};

/// Gaussian noise on the observed modes. Re and Im of each half-lattice
/// coefficient are drawn independently with the given variance and mirrored
/// to the conjugate mode, so the physical field is real.
SpectralField generate_noise(const WaveGrid& grid, const NoiseSpec& spec, RngStream& rng);
/// field += noise, with the same draws generate_noise would make.
void add_noise(SpectralField& field, const NoiseSpec& spec, RngStream& rng);

// ---------------------------------------------------------------------------
// Norms

/// L2 norm over the selected modes, scaled by the domain measure so that it
/// matches the physical-space norm (integral of u^2)^(1/2).
double l2_norm(const SpectralField& field, Part part = Part::all, const Projector& p = {});

/// Trapezoidal-rule L2 norm of physical samples.
double quadrature_l2_norm(const WaveGrid& grid, std::span<const double> values);

struct SpectrumBin {
  int shell;
  double energy;
};

/// Energy per shell: |k| in 1D, unit-width annuli round(|k|_2) in 2D.
/// Bins sum to l2_norm(field)^2.
std::vector<SpectrumBin> energy_spectrum(const SpectralField& field);

}  // namespace cda
