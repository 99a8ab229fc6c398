#include "mfchaos/core.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace mfchaos {

ParticleState::ParticleState(std::size_t dim, std::size_t n_particles, double time)
    : dim_(dim), n_(n_particles), coords_(dim * n_particles, 0.0), time_(time) {
  if (dim == 0) {
    throw std::invalid_argument("ParticleState: dim must be positive");
  }
  if (!(time >= 0.0)) {
    throw std::invalid_argument("ParticleState: time must be nonnegative");
  }
}

ParticleState::ParticleState(std::size_t dim, std::vector<double> coords, double time)
    : dim_(dim), coords_(std::move(coords)), time_(time) {
  if (dim == 0) {
    throw std::invalid_argument("ParticleState: dim must be positive");
  }
  if (coords_.size() % dim != 0) {
    throw std::invalid_argument("ParticleState: coordinate count is not a multiple of dim");
  }
  if (!(time >= 0.0)) {
    throw std::invalid_argument("ParticleState: time must be nonnegative");
  }
  n_ = coords_.size() / dim;
}

void ParticleState::set_time(double t) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("ParticleState: time must be nonnegative");
  }
  time_ = t;
}

bool ParticleState::all_finite() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](double x) { return std::isfinite(x); });
}

EmpiricalMeasure::EmpiricalMeasure(std::size_t dim, std::vector<double> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim == 0 || atoms_.empty() || atoms_.size() % dim != 0) {
    throw std::invalid_argument("EmpiricalMeasure: need at least one atom of positive dim");
  }
}

double EmpiricalMeasure::average(
    const std::function<double(std::span<const double>)> &f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    acc += f(atom(i));
  }
  return acc / static_cast<double>(size());
}

EmpiricalMeasure empirical_from_state(const ParticleState &state) {
  if (state.size() == 0) {
    throw std::invalid_argument("empirical_from_state: empty state");
  }
  const auto c = state.coords();
  return EmpiricalMeasure(state.dim(), std::vector<double>(c.begin(), c.end()));
}

MomentVector moment(const EmpiricalMeasure &mu, double q) {
  if (!(q >= 0.0)) {
    throw std::invalid_argument("moment: order must be nonnegative");
  }
  const double value = mu.average([q](std::span<const double> z) {
    return std::pow(1.0 + squared_norm(z), 0.5 * q);
  });
  return {q, value};
}

ParticleState quantile_init_1d(const std::function<double(double)> &inverse_cdf,
                               std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("quantile_init_1d: n must be positive");
  }
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    x[j] = inverse_cdf(p);
    if (!std::isfinite(x[j])) {
      throw std::domain_error("quantile_init_1d: inverse CDF returned a non-finite value at p=" +
                              std::to_string(p));
    }
  }
  std::sort(x.begin(), x.end());
  return ParticleState(1, std::move(x));
}

ParticleState gaussian_sample_state(std::span<const double> mean,
                                    std::span<const double> variances, std::size_t n,
                                    RngStream &rng) {
  if (mean.empty() || mean.size() != variances.size()) {
    throw std::invalid_argument("gaussian_sample_state: mean/variance size mismatch");
  }
  std::vector<double> sd(variances.size());
  for (std::size_t k = 0; k < variances.size(); ++k) {
    if (!(variances[k] >= 0.0)) {
      throw std::invalid_argument("gaussian_sample_state: negative variance");
    }
    sd[k] = std::sqrt(variances[k]);
  }
  ParticleState s(mean.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = s.particle(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = mean[k] + sd[k] * rng.normal();
    }
  }
  return s;
}

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return s;
}

std::vector<double> total_momentum(const ParticleState &state) {
  std::vector<double> p(state.dim(), 0.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto v = state.particle(i);
    for (std::size_t k = 0; k < v.size(); ++k) {
      p[k] += v[k];
    }
  }
  return p;
}

double total_energy(const ParticleState &state) {
  return squared_norm(state.coords());
}

} // namespace mfchaos
