#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mfchaos/angular_kernel.hpp"
#include "mfchaos/core.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos {

/// How the N-particle collision generator enumerates pairs.
///  - Unordered: (1/N) sum over i<j, total rate (N-1)/2.
///  - Ordered:   (1/N) sum over i != j, total rate N-1.
/// Every collision event applies the full two-particle update once.
enum class PairConvention { Unordered, Ordered };

const char *to_string(PairConvention c);
double total_collision_rate(std::size_t n_particles, PairConvention c);

struct CollisionEvent {
  double time;
  std::size_t i;
  std::size_t j;
  std::vector<double> sigma;
};

/// In-place elastic update of a pair:
///   v_i* = w/2 + |u| sigma / 2,  v_j* = w/2 - |u| sigma / 2,
/// with w = v_i + v_j, u = v_i - v_j. Leaves the pair untouched when u = 0.
void collide_elastic(std::span<double> v_i, std::span<double> v_j,
                     std::span<const double> sigma);

std::pair<std::vector<double>, std::vector<double>>
collide_elastic_copy(std::span<const double> v_i, std::span<const double> v_j,
                     std::span<const double> sigma);

/// Unit relative direction (v_i - v_j)/|v_i - v_j|; returns false when the
/// velocities coincide (out is left unspecified).
bool relative_direction(std::span<const double> v_i, std::span<const double> v_j,
                        std::span<double> out);

/// Samples the next collision of the Kac walk: exponential waiting time at
/// the total rate of the pair convention, uniform pair, sigma from the
/// kernel relative to the pair's current u_hat. Draw order per event:
/// waiting time, first index, second index, sigma. Does not modify state.
CollisionEvent next_collision(const ParticleState &state, const AngularKernel &kernel,
                              RngStream &rng,
                              PairConvention convention = PairConvention::Unordered);

/// Event-driven exact simulator of the elastic Kac walk for Maxwell
/// molecules with cutoff.
class KacSimulator {
public:
  KacSimulator(ParticleState initial, AngularKernel kernel, RngStream rng,
               PairConvention convention = PairConvention::Unordered);

  const ParticleState &state() const { return state_; }
  std::size_t events() const { return events_; }
  const RngStream &rng() const { return rng_; }

  /// Applies the next collision and returns it (state time = event time).
  CollisionEvent step();

  /// Runs all events with time <= t and sets the clock to t. The pending
  /// event past t is kept, so repeated calls form one trajectory.
  void advance_to(double t);

private:
  void draw_pending();

  ParticleState state_;
  AngularKernel kernel_;
  RngStream rng_;
  PairConvention convention_;
  std::size_t events_ = 0;
  CollisionEvent pending_{};
  bool has_pending_ = false;
};

/// Snapshots of the Kac walk at the requested (sorted) times in [0, t_end].
std::vector<ParticleState> simulate_kac(const ParticleState &initial,
                                        const AngularKernel &kernel, double t_end,
                                        std::span<const double> snapshot_times, RngStream &rng,
                                        PairConvention convention = PairConvention::Unordered);

/// Throws unless times are sorted and lie in [t0, t_end].
void validate_snapshot_times(std::span<const double> times, double t0, double t_end);

} // namespace mfchaos
