#include "mfchaos/kac_elastic.hpp"

#include <cmath>
#include <stdexcept>

namespace mfchaos {

const char *to_string(PairConvention c) {
  return c == PairConvention::Ordered ? "ordered" : "unordered";
}

double total_collision_rate(std::size_t n, PairConvention c) {
  const double pairs = static_cast<double>(n) - 1.0;
  return c == PairConvention::Ordered ? pairs : 0.5 * pairs;
}

void collide_elastic(std::span<double> v_i, std::span<double> v_j,
                     std::span<const double> sigma) {
  const std::size_t d = v_i.size();
  double u2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double u = v_i[k] - v_j[k];
    u2 += u * u;
  }
  if (u2 == 0.0) {
    return;
  }
  const double half_u = 0.5 * std::sqrt(u2);
  for (std::size_t k = 0; k < d; ++k) {
    const double half_w = 0.5 * (v_i[k] + v_j[k]);
    v_i[k] = half_w + half_u * sigma[k];
    v_j[k] = half_w - half_u * sigma[k];
  }
}

std::pair<std::vector<double>, std::vector<double>>
collide_elastic_copy(std::span<const double> v_i, std::span<const double> v_j,
                     std::span<const double> sigma) {
  std::vector<double> a(v_i.begin(), v_i.end()), b(v_j.begin(), v_j.end());
  collide_elastic(a, b, sigma);
  return {std::move(a), std::move(b)};
}

bool relative_direction(std::span<const double> v_i, std::span<const double> v_j,
                        std::span<double> out) {
  double u2 = 0.0;
  for (std::size_t k = 0; k < v_i.size(); ++k) {
    out[k] = v_i[k] - v_j[k];
    u2 += out[k] * out[k];
  }
  if (u2 == 0.0) {
    return false;
  }
  const double inv = 1.0 / std::sqrt(u2);
  for (double &x : out) {
    x *= inv;
  }
  return true;
}

namespace {

// Uniform unordered pair via a uniform ordered pair (i, j), i != j.
std::pair<std::size_t, std::size_t> draw_pair(std::size_t n, RngStream &rng) {
  const std::size_t i = rng.uniform_index(n);
  std::size_t j = rng.uniform_index(n - 1);
  if (j >= i) {
    ++j;
  }
  return {i, j};
}

} // namespace

CollisionEvent next_collision(const ParticleState &state, const AngularKernel &kernel,
                              RngStream &rng, PairConvention convention) {
  const std::size_t n = state.size();
  if (n < 2) {
    throw std::invalid_argument("next_collision: need at least two particles");
  }
  if (kernel.dim() != state.dim()) {
    throw std::invalid_argument("next_collision: kernel and state dimensions differ");
  }
  CollisionEvent ev;
  ev.time = state.time() + rng.exponential(total_collision_rate(n, convention));
  std::tie(ev.i, ev.j) = draw_pair(n, rng);
  std::vector<double> u_hat(state.dim(), 0.0);
  if (!relative_direction(state.particle(ev.i), state.particle(ev.j), u_hat)) {
    // Degenerate pair: any axis keeps the draw count fixed; the update is a no-op.
    std::fill(u_hat.begin(), u_hat.end(), 0.0);
    u_hat[0] = 1.0;
  }
  ev.sigma.resize(state.dim());
  sample_sigma(kernel, u_hat, rng, ev.sigma);
  return ev;
}

KacSimulator::KacSimulator(ParticleState initial, AngularKernel kernel, RngStream rng,
                           PairConvention convention)
    : state_(std::move(initial)), kernel_(std::move(kernel)), rng_(rng),
      convention_(convention) {
  if (kernel_.dim() != state_.dim()) {
    throw std::invalid_argument("KacSimulator: kernel and state dimensions differ");
  }
}

void KacSimulator::draw_pending() {
  if (!has_pending_) {
    pending_ = next_collision(state_, kernel_, rng_, convention_);
    has_pending_ = true;
  }
}

CollisionEvent KacSimulator::step() {
  draw_pending();
  has_pending_ = false;
  collide_elastic(state_.particle(pending_.i), state_.particle(pending_.j), pending_.sigma);
  state_.set_time(pending_.time);
  ++events_;
  return pending_;
}

void KacSimulator::advance_to(double t) {
  if (t < state_.time()) {
    throw std::invalid_argument("KacSimulator::advance_to: time runs backwards");
  }
  if (state_.size() < 2) {
    state_.set_time(t);
    return;
  }
  for (;;) {
    draw_pending();
    if (pending_.time > t) {
      break;
    }
    step();
  }
  state_.set_time(t);
}

void validate_snapshot_times(std::span<const double> times, double t0, double t_end) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= t0) || !(times[k] <= t_end)) {
      throw std::invalid_argument("snapshot time outside [start, t_end]");
    }
    if (k > 0 && times[k] < times[k - 1]) {
      throw std::invalid_argument("snapshot times must be sorted");
    }
  }
}

std::vector<ParticleState> simulate_kac(const ParticleState &initial,
                                        const AngularKernel &kernel, double t_end,
                                        std::span<const double> snapshot_times, RngStream &rng,
                                        PairConvention convention) {
  validate_snapshot_times(snapshot_times, initial.time(), t_end);
  KacSimulator sim(initial, kernel, rng, convention);
  std::vector<ParticleState> out;
  out.reserve(snapshot_times.size());
  for (double t : snapshot_times) {
    sim.advance_to(t);
    out.push_back(sim.state());
  }
  rng = sim.rng();
  return out;
}

} // namespace mfchaos
