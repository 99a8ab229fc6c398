#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfchaos/rng.hpp"

namespace mfchaos {

/// Raised when a trajectory produces non-finite coordinates.
class BlowUpError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// State of an N-particle system: N points in R^m stored contiguously
/// (particle-major, N*m reals) plus the simulation clock.
class ParticleState {
public:
  ParticleState() = default;
  ParticleState(std::size_t dim, std::size_t n_particles, double time = 0.0);
  ParticleState(std::size_t dim, std::vector<double> coords, double time = 0.0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return n_; }
  double time() const { return time_; }
  void set_time(double t);

  std::span<double> particle(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> particle(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> coords() { return coords_; }
  std::span<const double> coords() const { return coords_; }

  bool all_finite() const;

  friend bool operator==(const ParticleState &, const ParticleState &) = default;

private:
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> coords_;
  double time_ = 0.0;
};

/// Uniform-weight atomic measure (1/N) sum_j delta_{z_j}.
class EmpiricalMeasure {
public:
  EmpiricalMeasure(std::size_t dim, std::vector<double> atoms);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return atoms_.size() / dim_; }
  double weight() const { return 1.0 / static_cast<double>(size()); }
  std::span<const double> atom(std::size_t i) const {
    return {atoms_.data() + i * dim_, dim_};
  }
  std::span<const double> atoms() const { return atoms_; }

  /// Mean of f over atoms.
  double average(const std::function<double(std::span<const double>)> &f) const;

private:
  std::size_t dim_;
  std::vector<double> atoms_;
};

EmpiricalMeasure empirical_from_state(const ParticleState &state);

struct MomentVector {
  double order_q;
  double value;
};

/// M_q(mu) = mean of (1 + |z|^2)^(q/2).
MomentVector moment(const EmpiricalMeasure &mu, double q);

/// coords_j = F^{-1}((j - 1/2)/n), j = 1..n. Deterministic.
ParticleState quantile_init_1d(const std::function<double(double)> &inverse_cdf,
                               std::size_t n);

/// N i.i.d. draws from the diagonal Gaussian N(mean, diag(variances)).
/// Particle-major draw order: particle 0 coordinates first.
ParticleState gaussian_sample_state(std::span<const double> mean,
                                    std::span<const double> variances, std::size_t n,
                                    RngStream &rng);

/// Standard normal quantile function.
double normal_quantile(double p);

double squared_norm(std::span<const double> v);

/// Componentwise sum of all particles.
std::vector<double> total_momentum(const ParticleState &state);
/// Sum over particles of |z_i|^2.
double total_energy(const ParticleState &state);

} // namespace mfchaos
