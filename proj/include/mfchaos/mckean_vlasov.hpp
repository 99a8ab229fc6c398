#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/core.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos {

/// Pair interaction U : R^m -> R^m from a small closed-form catalog. Every
/// entry is odd with U(0) = 0.
///   zero                          U = 0
///   linear                        U(z) = -strength z
///   gaussian_derivative           U(z) = -strength z exp(-|z|^2 / (2 width^2))
///   screened_coulomb_mollified    U(z) = strength z exp(-r/screening) / r^3,
///                                 r = sqrt(|z|^2 + width^2)
struct InteractionKernel {
  enum class Kind { Zero, Linear, GaussianDerivative, ScreenedCoulombMollified };

  Kind kind = Kind::Zero;
  double strength = 0.0;
  double width = 1.0;
  double screening = 1.0;

  static InteractionKernel zero() { return {}; }
  static InteractionKernel linear(double kappa) { return {Kind::Linear, kappa, 1.0, 1.0}; }
  static InteractionKernel gaussian_derivative(double strength, double width) {
    return {Kind::GaussianDerivative, strength, width, 1.0};
  }
  static InteractionKernel screened_coulomb_mollified(double strength, double epsilon,
                                                      double screening) {
    return {Kind::ScreenedCoulombMollified, strength, epsilon, screening};
  }
  static InteractionKernel from_name(const std::string &name, double strength, double width,
                                     double screening);

  std::string name() const;

  /// U(z) = radial_factor(|z|^2) z.
  double radial_factor(double r2) const;

  /// out = U(z).
  void evaluate(std::span<const double> z, std::span<double> out) const;
};

/// dZ_i = (T Z_i + F_i) dt + sigma dB_i with F_i = c_N (1/N) sum_{j != i} U(Z_i - Z_j);
/// c_N = N/(N-1) when `mean_field_prefactor` is set, 1 otherwise.
struct DriftDiffusionSpec {
  std::size_t dim = 1;
  std::vector<double> linear_drift; // m x m, row-major
  std::vector<double> diffusion;    // m x m, row-major (sigma, A = sigma sigma^T / 2)
  InteractionKernel interaction;
  bool mean_field_prefactor = false;

  static DriftDiffusionSpec isotropic(std::size_t dim, double drift_rate, double noise,
                                      InteractionKernel interaction);
  void validate() const;
};

/// Deterministic Vlasov system on (x, v) in R^d x R^d:
///   x' = v,  v' = (1/N) sum_j grad_psi(x_i - x_j).
struct VlasovSpec {
  std::size_t space_dim = 1;
  InteractionKernel potential_gradient;
};

std::vector<double> pairwise_force(const ParticleState &state, const DriftDiffusionSpec &spec,
                                   std::size_t i);

/// Interaction force on every particle, written particle-major into out.
/// Linear kernels use the exact O(N) identity (1/N) sum_{j != i} (z_i - z_j) = z_i - mean.
void all_forces(const ParticleState &state, const DriftDiffusionSpec &spec,
                std::span<double> out);

/// One Euler-Maruyama step. Draw order: particle-major, m normals each.
ParticleState em_step(const ParticleState &state, const DriftDiffusionSpec &spec, double dt,
                      RngStream &rng);

std::vector<ParticleState> simulate_mkv(const ParticleState &initial,
                                        const DriftDiffusionSpec &spec, double t_end, double dt,
                                        std::span<const double> snapshot_times, RngStream &rng);

/// Explicit midpoint integration; bit-identical on repeated runs.
std::vector<ParticleState> simulate_vlasov(const ParticleState &initial, const VlasovSpec &spec,
                                           double t_end, double dt,
                                           std::span<const double> snapshot_times);

/// Vlasov acceleration of each particle (size N*d).
void vlasov_accelerations(const ParticleState &state, const VlasovSpec &spec,
                          std::span<double> out);

/// Step index of each snapshot for a fixed-step integrator; throws if a
/// snapshot does not sit on the dt lattice (relative tolerance 1e-9).
std::vector<std::size_t> snapshot_steps(std::span<const double> times, double t0, double t_end,
                                        double dt);

/// Mean and per-coordinate variance of the limit law over time.
struct MomentTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> variance;
};

/// Closed moment system of the mean-field limit for U(z) = -kappa z,
/// T = -lambda I, sigma = diag(s):
///   m' = -lambda m,   v' = -2 (lambda + kappa) v + s^2,
/// integrated with RK4 at step `ode_dt`. Rejects any other structure.
MomentTrajectory mkv_moment_oracle(const DriftDiffusionSpec &spec,
                                   std::span<const double> mean0,
                                   std::span<const double> variance0,
                                   std::span<const double> times, double ode_dt = 1e-3);

/// Same moments from the explicit solution of the linear ODEs.
MomentTrajectory mkv_moment_closed_form(const DriftDiffusionSpec &spec,
                                        std::span<const double> mean0,
                                        std::span<const double> variance0,
                                        std::span<const double> times);

} // namespace mfchaos
