#include "mfchaos/inelastic_thermostat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfchaos {

void RestitutionParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("RestitutionParams: alpha must lie in (0, 1)");
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("RestitutionParams: nu must be finite and nonnegative");
  }
  if (dim == 0) {
    throw std::invalid_argument("RestitutionParams: dim must be positive");
  }
}

void collide_inelastic(std::span<double> v_i, std::span<double> v_j,
                       std::span<const double> sigma, double alpha) {
  const std::size_t d = v_i.size();
  double u2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double u = v_i[k] - v_j[k];
    u2 += u * u;
  }
  if (u2 == 0.0) {
    return;
  }
  const double norm_u = std::sqrt(u2);
  const double a = 0.5 * (1.0 - alpha);
  const double b = 0.5 * (1.0 + alpha);
  for (std::size_t k = 0; k < d; ++k) {
    const double u = v_i[k] - v_j[k];
    const double half_w = 0.5 * (v_i[k] + v_j[k]);
    const double half_u_star = 0.5 * (a * u + b * norm_u * sigma[k]);
    v_i[k] = half_w + half_u_star;
    v_j[k] = half_w - half_u_star;
  }
}

std::pair<std::vector<double>, std::vector<double>>
collide_inelastic_copy(std::span<const double> v_i, std::span<const double> v_j,
                       std::span<const double> sigma, double alpha) {
  std::vector<double> a(v_i.begin(), v_i.end()), b(v_j.begin(), v_j.end());
  collide_inelastic(a, b, sigma, alpha);
  return {std::move(a), std::move(b)};
}

double expected_pair_energy_change(double alpha, double mean_cosine, double u_squared) {
  return -(1.0 - alpha * alpha) * (1.0 - mean_cosine) * u_squared / 4.0;
}

ThermostatSimulator::ThermostatSimulator(ParticleState initial, AngularKernel kernel,
                                         RestitutionParams params, RngStream rng,
                                         PairConvention convention)
    : state_(std::move(initial)), kernel_(std::move(kernel)), params_(params), rng_(rng),
      convention_(convention), last_update_(state_.size(), state_.time()) {
  params_.validate();
  if (kernel_.dim() != state_.dim() || params_.dim != state_.dim()) {
    throw std::invalid_argument("ThermostatSimulator: kernel, params and state dims differ");
  }
}

void ThermostatSimulator::diffuse(std::size_t i, double t) {
  const double dt = t - last_update_[i];
  auto v = state_.particle(i);
  if (dt > 0.0 && params_.nu > 0.0) {
    const double sd = std::sqrt(2.0 * params_.nu * dt);
    for (double &x : v) {
      x += sd * rng_.normal();
    }
  }
  last_update_[i] = t;
}

void ThermostatSimulator::advance_to(double t) {
  if (!(t > state_.time())) {
    throw std::invalid_argument("ThermostatSimulator::advance_to: target must exceed current time");
  }
  const std::size_t n = state_.size();
  const std::size_t d = state_.dim();
  std::vector<double> u_hat(d), sigma(d);
  if (n >= 2) {
    const double rate = total_collision_rate(n, convention_);
    for (;;) {
      if (!has_pending_) {
        pending_time_ = state_.time() + rng_.exponential(rate);
        has_pending_ = true;
      }
      if (pending_time_ > t) {
        break;
      }
      has_pending_ = false;
      const double te = pending_time_;
      const std::size_t i = rng_.uniform_index(n);
      std::size_t j = rng_.uniform_index(n - 1);
      if (j >= i) {
        ++j;
      }
      diffuse(i, te);
      diffuse(j, te);
      auto vi = state_.particle(i);
      auto vj = state_.particle(j);
      if (!relative_direction(vi, vj, u_hat)) {
        std::fill(u_hat.begin(), u_hat.end(), 0.0);
        u_hat[0] = 1.0;
      }
      sample_sigma(kernel_, u_hat, rng_, sigma);
      const double before = squared_norm(vi) + squared_norm(vj);
      collide_inelastic(vi, vj, sigma, params_.alpha);
      state_.set_time(te);
      ++events_;
      if (observer_) {
        observer_(squared_norm(vi) + squared_norm(vj) - before);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    diffuse(i, t);
  }
  state_.set_time(t);
  if (!state_.all_finite()) {
    throw BlowUpError("ThermostatSimulator: non-finite velocities");
  }
}

ParticleState step_mixed(const ParticleState &state, const AngularKernel &kernel,
                         const RestitutionParams &params, double until, RngStream &rng,
                         PairConvention convention) {
  if (!(until > state.time())) {
    throw std::invalid_argument("step_mixed: until must exceed the current time");
  }
  ThermostatSimulator sim(state, kernel, params, rng, convention);
  sim.advance_to(until);
  rng = sim.rng();
  return sim.state();
}

std::vector<ParticleState> simulate_thermostat(const ParticleState &initial,
                                               const AngularKernel &kernel,
                                               const RestitutionParams &params, double t_end,
                                               std::span<const double> snapshot_times,
                                               RngStream &rng, PairConvention convention) {
  validate_snapshot_times(snapshot_times, initial.time(), t_end);
  ThermostatSimulator sim(initial, kernel, params, rng, convention);
  std::vector<ParticleState> out;
  out.reserve(snapshot_times.size());
  for (double t : snapshot_times) {
    if (t > sim.state().time()) {
      sim.advance_to(t);
    }
    out.push_back(sim.state());
  }
  rng = sim.rng();
  return out;
}

double temperature(const ParticleState &state) {
  return total_energy(state) / static_cast<double>(state.dim() * state.size());
}

SteadyTemperature steady_temperature_oracle(const RestitutionParams &params,
                                            const AngularKernel &kernel,
                                            PairConvention convention) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw std::invalid_argument("steady_temperature_oracle: alpha must lie in (0, 1]");
  }
  if (!(params.nu >= 0.0)) {
    throw std::invalid_argument("steady_temperature_oracle: nu must be nonnegative");
  }
  const double pairs = convention == PairConvention::Ordered ? 2.0 : 1.0;
  const double g = pairs * (1.0 - params.alpha * params.alpha) *
                   (1.0 - kernel.mean_cosine()) / 4.0;
  if (!(g > 0.0)) {
    return {params.nu > 0.0 ? std::numeric_limits<double>::infinity() : 0.0, 0.0,
            params.nu > 0.0};
  }
  return {2.0 * params.nu / g, g, false};
}

double balance_temperature(const SteadyTemperature &oracle, double nu, double t0_temperature,
                           double t) {
  if (oracle.relaxation_rate == 0.0) {
    return t0_temperature + 2.0 * nu * t;
  }
  return oracle.value + (t0_temperature - oracle.value) * std::exp(-oracle.relaxation_rate * t);
}

} // namespace mfchaos
