#pragma once

#include <array>
#include <vector>

#include "cda/model.hpp"

namespace cda {

/// How the nominal forcing amplitude f0 maps to the physical amplitude A of
/// the streamfunction forcing term A cos(k_f . x).
enum class ForcingScaling {
  unit,       ///< A = f0
  grid_cell,  ///< A = f0 dx dy (f0 given per grid-cell area of the unnormalized DFT)
};

struct NseParams {
  double nu = 0.01;
  double f0 = 50.0;
  ForcingScaling forcing_scaling = ForcingScaling::grid_cell;
  std::array<int, 2> k_f{5, 5};
  int n = 128;
  double dt = 0.01;
  /// Testing switch: drop the advection term (forcing is kept).
  bool nonlinear = true;

  void validate() const;
  /// Physical amplitude of the forcing term after scaling.
  double forcing_amplitude() const;
};

using NseState = ModelState;

/// Velocity and vorticity recovered from the streamfunction.
struct DerivedFields {
  SpectralField u1;  ///< d psi / dy
  SpectralField u2;  ///< -d psi / dx
  SpectralField omega;  ///< -Laplacian psi
};

/// Per-mode ETDRK4 coefficients for a diagonal real linear symbol, evaluated
/// by averaging over a circle in the complex plane around each L dt.
struct Etdrk4Coefficients {
  std::vector<double> e;     ///< e^{L dt}
  std::vector<double> e2;    ///< e^{L dt / 2}
  std::vector<double> q;     ///< L^-1 (e^{L dt/2} - 1)
  std::vector<double> f1;
  std::vector<double> f2;
  std::vector<double> f3;

  static Etdrk4Coefficients build(const std::vector<double>& symbol, double dt, int contour_points = 64);
};

/// 2D incompressible Navier-Stokes on [-pi, pi]^2 in streamfunction form,
///   psi_t = nu Lap psi - Lap^-1 (u . grad omega) + A cos(k_f . x),
/// pseudospectral with 2/3 dealiasing, ETDRK4 in time.
class NseSolver final : public ForwardModel {
 public:
  explicit NseSolver(const NseParams& params);

  const WaveGrid& grid() const override { return grid_; }
  double dt() const override { return params_.dt; }
  std::string name() const override { return "nse"; }
  const NseParams& params() const { return params_; }

  /// The zero field; the forcing drives it onto the attractor.
  ModelState initial_state() const override;

  DerivedFields derived_fields(const SpectralField& psi) const;
  /// Dealiased transform of u . grad omega.
  SpectralField advection(const SpectralField& psi) const;
  /// -Lap^-1 (u . grad omega) + forcing, mean-free.
  SpectralField nonlinear(const SpectralField& psi) const;
  const SpectralField& forcing() const { return forcing_; }

  void advance(ModelState& state) const override;
  void add_explicit_increment(SpectralField& next, const SpectralField& increment) const override;

  /// |k_phys|^2 per flat index.
  const std::vector<double>& k_squared() const { return k2_; }
  const Etdrk4Coefficients& coefficients() const { return coef_; }

  /// Kinetic energy (1/2) ||u||^2 of the streamfunction field.
  double kinetic_energy(const SpectralField& psi) const;

 private:
  NseParams params_;
  WaveGrid grid_;
  std::vector<double> kx_, ky_, k2_;
  SpectralField forcing_;
  Etdrk4Coefficients coef_;
};

/// Grashof label ||f|| / (nu^2 lambda_1) with lambda_1 = 1 on the 2 pi torus
/// and ||f|| taken as the nominal forcing amplitude f0.
double compute_grashof(const NseParams& params);

}  // namespace cda
