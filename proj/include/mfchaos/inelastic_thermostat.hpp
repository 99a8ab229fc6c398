#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mfchaos/angular_kernel.hpp"
#include "mfchaos/core.hpp"
#include "mfchaos/kac_elastic.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos {

/// alpha: restitution coefficient in (0, 1). nu: bath strength; nu = 0
/// switches the bath off (pure cooling).
struct RestitutionParams {
  double alpha = 0.8;
  double nu = 1.0;
  std::size_t dim = 3;

  void validate() const;
};

/// u* = ((1 - alpha)/2) u + ((1 + alpha)/2) |u| sigma; then
/// v_i* = w/2 + u*/2, v_j* = w/2 - u*/2. alpha = 1 is the elastic rule.
void collide_inelastic(std::span<double> v_i, std::span<double> v_j,
                       std::span<const double> sigma, double alpha);

std::pair<std::vector<double>, std::vector<double>>
collide_inelastic_copy(std::span<const double> v_i, std::span<const double> v_j,
                       std::span<const double> sigma, double alpha);

/// Expected kinetic energy change of one pair collision averaged over sigma:
/// -(1 - alpha^2)(1 - b_1)|u|^2 / 4.
double expected_pair_energy_change(double alpha, double mean_cosine, double u_squared);

/// Mixed jump-diffusion system: inelastic collisions at total rate N - 1
/// (ordered pairs, default) or (N - 1)/2, plus an independent Brownian bath
/// of generator nu * Laplacian on every particle.
///
/// Brownian increments are applied lazily: each particle keeps the time of
/// its last update and receives the exact Gaussian increment of variance
/// 2 nu dt per coordinate when it next collides or when the system is
/// synchronized at a snapshot. This is the same process in law as moving
/// every particle between consecutive events.
class ThermostatSimulator {
public:
  ThermostatSimulator(ParticleState initial, AngularKernel kernel, RestitutionParams params,
                      RngStream rng, PairConvention convention = PairConvention::Ordered);

  /// Synchronized state (valid after construction and after advance_to).
  const ParticleState &state() const { return state_; }
  std::size_t events() const { return events_; }
  const RngStream &rng() const { return rng_; }

  /// Runs the process to time t > current time and synchronizes all particles.
  void advance_to(double t);

  /// Optional per-event observer, called after each collision with the
  /// kinetic energy change of the colliding pair.
  void set_collision_observer(std::function<void(double)> observer) {
    observer_ = std::move(observer);
  }

private:
  void diffuse(std::size_t i, double t);

  ParticleState state_;
  AngularKernel kernel_;
  RestitutionParams params_;
  RngStream rng_;
  PairConvention convention_;
  std::vector<double> last_update_;
  double pending_time_ = 0.0;
  bool has_pending_ = false;
  std::size_t events_ = 0;
  std::function<void(double)> observer_;
};

ParticleState step_mixed(const ParticleState &state, const AngularKernel &kernel,
                         const RestitutionParams &params, double until, RngStream &rng,
                         PairConvention convention = PairConvention::Ordered);

std::vector<ParticleState> simulate_thermostat(const ParticleState &initial,
                                               const AngularKernel &kernel,
                                               const RestitutionParams &params, double t_end,
                                               std::span<const double> snapshot_times,
                                               RngStream &rng,
                                               PairConvention convention = PairConvention::Ordered);

/// Temperature T = (1/(dN)) sum |v_i|^2.
double temperature(const ParticleState &state);

/// Closed energy balance for the temperature:
///   dT/dt = -g T + 2 nu,
///   g = p (1 - alpha^2)(1 - b_1) / 4,  p = 2 (ordered pairs) or 1 (unordered).
/// The unordered value also describes the limit kinetic equation.
struct SteadyTemperature {
  double value;          // 2 nu / g, +inf when diverging
  double relaxation_rate; // g
  bool diverges;         // no dissipation (alpha = 1 or b_1 = 1)
};

/// Accepts alpha in (0, 1]; alpha = 1 is reported as divergent.
SteadyTemperature steady_temperature_oracle(const RestitutionParams &params,
                                            const AngularKernel &kernel,
                                            PairConvention convention = PairConvention::Ordered);

/// T(t) from the balance ODE started at T0.
double balance_temperature(const SteadyTemperature &oracle, double nu, double t0_temperature,
                           double t);

} // namespace mfchaos
