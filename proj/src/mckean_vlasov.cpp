#include "mfchaos/mckean_vlasov.hpp"

#include <cmath>
#include <stdexcept>

namespace mfchaos {

InteractionKernel InteractionKernel::from_name(const std::string &name, double strength,
                                               double width, double screening) {
  if (name == "zero") {
    return zero();
  }
  if (name == "linear") {
    return linear(strength);
  }
  if (name == "gaussian_derivative") {
    if (!(width > 0.0)) {
      throw std::invalid_argument("gaussian_derivative: width must be positive");
    }
    return gaussian_derivative(strength, width);
  }
  if (name == "screened_coulomb_mollified") {
    if (!(width > 0.0) || !(screening > 0.0)) {
      throw std::invalid_argument(
          "screened_coulomb_mollified: mollifier and screening length must be positive");
    }
    return screened_coulomb_mollified(strength, width, screening);
  }
  throw std::invalid_argument("unknown interaction kernel '" + name + "'");
}

std::string InteractionKernel::name() const {
  switch (kind) {
  case Kind::Zero:
    return "zero";
  case Kind::Linear:
    return "linear";
  case Kind::GaussianDerivative:
    return "gaussian_derivative";
  case Kind::ScreenedCoulombMollified:
    return "screened_coulomb_mollified";
  }
  return "unknown";
}

double InteractionKernel::radial_factor(double r2) const {
  switch (kind) {
  case Kind::Zero:
    return 0.0;
  case Kind::Linear:
    return -strength;
  case Kind::GaussianDerivative:
    return -strength * std::exp(-0.5 * r2 / (width * width));
  case Kind::ScreenedCoulombMollified: {
    const double r = std::sqrt(r2 + width * width);
    return strength * std::exp(-r / screening) / (r * r * r);
  }
  }
  return 0.0;
}

void InteractionKernel::evaluate(std::span<const double> z, std::span<double> out) const {
  const double factor = radial_factor(squared_norm(z));
  for (std::size_t k = 0; k < z.size(); ++k) {
    out[k] = factor * z[k];
  }
}

DriftDiffusionSpec DriftDiffusionSpec::isotropic(std::size_t dim, double drift_rate,
                                                 double noise, InteractionKernel interaction) {
  DriftDiffusionSpec s;
  s.dim = dim;
  s.linear_drift.assign(dim * dim, 0.0);
  s.diffusion.assign(dim * dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    s.linear_drift[k * dim + k] = drift_rate;
    s.diffusion[k * dim + k] = noise;
  }
  s.interaction = interaction;
  return s;
}

void DriftDiffusionSpec::validate() const {
  if (dim == 0) {
    throw std::invalid_argument("DriftDiffusionSpec: dim must be positive");
  }
  if (linear_drift.size() != dim * dim || diffusion.size() != dim * dim) {
    throw std::invalid_argument("DriftDiffusionSpec: matrices must be dim x dim");
  }
}

namespace {

double prefactor(const DriftDiffusionSpec &spec, std::size_t n) {
  if (spec.mean_field_prefactor && n > 1) {
    return static_cast<double>(n) / static_cast<double>(n - 1);
  }
  return 1.0;
}

void check_finite(const ParticleState &s, const char *who) {
  if (!s.all_finite()) {
    throw BlowUpError(std::string(who) + ": non-finite coordinates at t=" +
                      std::to_string(s.time()));
  }
}

} // namespace

std::vector<double> pairwise_force(const ParticleState &state, const DriftDiffusionSpec &spec,
                                   std::size_t i) {
  const std::size_t n = state.size();
  const std::size_t m = state.dim();
  if (i >= n) {
    throw std::out_of_range("pairwise_force: particle index out of range");
  }
  std::vector<double> f(m, 0.0), z(m), u(m);
  const auto zi = state.particle(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      continue;
    }
    const auto zj = state.particle(j);
    for (std::size_t k = 0; k < m; ++k) {
      z[k] = zi[k] - zj[k];
    }
    spec.interaction.evaluate(z, u);
    for (std::size_t k = 0; k < m; ++k) {
      f[k] += u[k];
    }
  }
  const double scale = prefactor(spec, n) / static_cast<double>(n);
  for (double &x : f) {
    x *= scale;
  }
  return f;
}

void all_forces(const ParticleState &state, const DriftDiffusionSpec &spec,
                std::span<double> out) {
  const std::size_t n = state.size();
  const std::size_t m = state.dim();
  using Kind = InteractionKernel::Kind;
  if (spec.interaction.kind == Kind::Zero) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (spec.interaction.kind == Kind::Linear) {
    const auto p = total_momentum(state);
    const double c = -spec.interaction.strength * prefactor(spec, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto zi = state.particle(i);
      for (std::size_t k = 0; k < m; ++k) {
        out[i * m + k] = c * (zi[k] - p[k] / static_cast<double>(n));
      }
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = pairwise_force(state, spec, i);
    std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>(i * m));
  }
}

ParticleState em_step(const ParticleState &state, const DriftDiffusionSpec &spec, double dt,
                      RngStream &rng) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("em_step: dt must be positive");
  }
  spec.validate();
  if (spec.dim != state.dim()) {
    throw std::invalid_argument("em_step: spec and state dimensions differ");
  }
  const std::size_t n = state.size();
  const std::size_t m = state.dim();
  std::vector<double> force(n * m);
  all_forces(state, spec, force);
  ParticleState next = state;
  const double sqdt = std::sqrt(dt);
  std::vector<double> xi(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = state.particle(i);
    auto out = next.particle(i);
    for (std::size_t k = 0; k < m; ++k) {
      xi[k] = rng.normal();
    }
    for (std::size_t a = 0; a < m; ++a) {
      double drift = force[i * m + a];
      double noise = 0.0;
      for (std::size_t b = 0; b < m; ++b) {
        drift += spec.linear_drift[a * m + b] * z[b];
        noise += spec.diffusion[a * m + b] * xi[b];
      }
      out[a] = z[a] + drift * dt + sqdt * noise;
    }
  }
  next.set_time(state.time() + dt);
  check_finite(next, "em_step");
  return next;
}

std::vector<std::size_t> snapshot_steps(std::span<const double> times, double t0, double t_end,
                                        double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  std::vector<std::size_t> steps;
  steps.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < t0 || t > t_end) {
      throw std::invalid_argument("snapshot time outside [start, t_end]");
    }
    if (k > 0 && t < times[k - 1]) {
      throw std::invalid_argument("snapshot times must be sorted");
    }
    const double ratio = (t - t0) / dt;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio)) {
      throw std::invalid_argument("snapshot time " + std::to_string(t) +
                                  " is not a multiple of dt");
    }
    steps.push_back(static_cast<std::size_t>(r));
  }
  return steps;
}

std::vector<ParticleState> simulate_mkv(const ParticleState &initial,
                                        const DriftDiffusionSpec &spec, double t_end, double dt,
                                        std::span<const double> snapshot_times, RngStream &rng) {
  const auto steps = snapshot_steps(snapshot_times, initial.time(), t_end, dt);
  std::vector<ParticleState> out;
  out.reserve(steps.size());
  ParticleState s = initial;
  std::size_t done = 0;
  for (std::size_t target : steps) {
    while (done < target) {
      s = em_step(s, spec, dt, rng);
      ++done;
      s.set_time(initial.time() + static_cast<double>(done) * dt);
    }
    out.push_back(s);
  }
  return out;
}

void vlasov_accelerations(const ParticleState &state, const VlasovSpec &spec,
                          std::span<double> out) {
  const std::size_t n = state.size();
  const std::size_t d = spec.space_dim;
  std::fill(out.begin(), out.end(), 0.0);
  // Every catalog kernel is odd, U(-z) = -U(z), so each pair is evaluated once.
  std::vector<double> dx(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = state.particle(i);
    double *acc_i = out.data() + i * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto zj = state.particle(j);
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dx[k] = zi[k] - zj[k];
        r2 += dx[k] * dx[k];
      }
      const double f = spec.potential_gradient.radial_factor(r2);
      double *acc_j = out.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) {
        acc_i[k] += f * dx[k];
        acc_j[k] -= f * dx[k];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double &a : out) {
    a *= inv_n;
  }
}

std::vector<ParticleState> simulate_vlasov(const ParticleState &initial, const VlasovSpec &spec,
                                           double t_end, double dt,
                                           std::span<const double> snapshot_times) {
  const std::size_t d = spec.space_dim;
  if (initial.dim() != 2 * d) {
    throw std::invalid_argument("simulate_vlasov: state must hold (x, v) pairs of dim 2d");
  }
  const auto steps = snapshot_steps(snapshot_times, initial.time(), t_end, dt);
  const std::size_t n = initial.size();
  std::vector<ParticleState> out;
  out.reserve(steps.size());
  ParticleState s = initial;
  ParticleState mid = initial;
  std::vector<double> acc(n * d);
  std::size_t done = 0;
  for (std::size_t target : steps) {
    while (done < target) {
      vlasov_accelerations(s, spec, acc);
      for (std::size_t i = 0; i < n; ++i) {
        const auto z = s.particle(i);
        auto zm = mid.particle(i);
        for (std::size_t k = 0; k < d; ++k) {
          zm[k] = z[k] + 0.5 * dt * z[d + k];
          zm[d + k] = z[d + k] + 0.5 * dt * acc[i * d + k];
        }
      }
      vlasov_accelerations(mid, spec, acc);
      for (std::size_t i = 0; i < n; ++i) {
        auto z = s.particle(i);
        const auto zm = mid.particle(i);
        for (std::size_t k = 0; k < d; ++k) {
          z[k] += dt * zm[d + k];
          z[d + k] += dt * acc[i * d + k];
        }
      }
      ++done;
      s.set_time(initial.time() + static_cast<double>(done) * dt);
      check_finite(s, "simulate_vlasov");
    }
    out.push_back(s);
  }
  return out;
}

namespace {

struct LinearCoefficients {
  double kappa;
  double lambda;
  std::vector<double> noise;
};

LinearCoefficients linear_coefficients(const DriftDiffusionSpec &spec) {
  spec.validate();
  using Kind = InteractionKernel::Kind;
  if (spec.interaction.kind != Kind::Linear && spec.interaction.kind != Kind::Zero) {
    throw std::invalid_argument("mkv_moment_oracle: interaction must be linear");
  }
  const std::size_t m = spec.dim;
  LinearCoefficients c{spec.interaction.kind == Kind::Linear ? spec.interaction.strength : 0.0,
                       -spec.linear_drift[0], std::vector<double>(m)};
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double t = spec.linear_drift[a * m + b];
      const double s = spec.diffusion[a * m + b];
      if (a == b) {
        if (t != -c.lambda) {
          throw std::invalid_argument("mkv_moment_oracle: drift must be -lambda I");
        }
        c.noise[a] = s;
      } else if (t != 0.0 || s != 0.0) {
        throw std::invalid_argument("mkv_moment_oracle: drift and diffusion must be diagonal");
      }
    }
  }
  if (c.kappa < 0.0 || c.lambda < 0.0) {
    throw std::invalid_argument("mkv_moment_oracle: kappa and lambda must be nonnegative");
  }
  return c;
}

void check_moment_inputs(const DriftDiffusionSpec &spec, std::span<const double> mean0,
                         std::span<const double> var0) {
  if (mean0.size() != spec.dim || var0.size() != spec.dim) {
    throw std::invalid_argument("mkv_moment_oracle: initial moments must have size dim");
  }
}

} // namespace

MomentTrajectory mkv_moment_oracle(const DriftDiffusionSpec &spec,
                                   std::span<const double> mean0,
                                   std::span<const double> variance0,
                                   std::span<const double> times, double ode_dt) {
  const auto c = linear_coefficients(spec);
  check_moment_inputs(spec, mean0, variance0);
  if (!(ode_dt > 0.0)) {
    throw std::invalid_argument("mkv_moment_oracle: ode_dt must be positive");
  }
  const std::size_t m = spec.dim;
  // y = (mean, variance), y' = A y + b componentwise.
  std::vector<double> y(2 * m);
  std::copy(mean0.begin(), mean0.end(), y.begin());
  std::copy(variance0.begin(), variance0.end(), y.begin() + static_cast<std::ptrdiff_t>(m));
  auto rhs = [&](const std::vector<double> &in, std::vector<double> &out) {
    for (std::size_t k = 0; k < m; ++k) {
      out[k] = -c.lambda * in[k];
      out[m + k] = -2.0 * (c.lambda + c.kappa) * in[m + k] + c.noise[k] * c.noise[k];
    }
  };
  MomentTrajectory traj;
  std::vector<double> k1(2 * m), k2(2 * m), k3(2 * m), k4(2 * m), tmp(2 * m);
  double t = 0.0;
  for (double target : times) {
    if (target < t) {
      throw std::invalid_argument("mkv_moment_oracle: times must be sorted and nonnegative");
    }
    while (t < target) {
      const double h = std::min(ode_dt, target - t);
      rhs(y, k1);
      for (std::size_t k = 0; k < y.size(); ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
      rhs(tmp, k2);
      for (std::size_t k = 0; k < y.size(); ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
      rhs(tmp, k3);
      for (std::size_t k = 0; k < y.size(); ++k) tmp[k] = y[k] + h * k3[k];
      rhs(tmp, k4);
      for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      }
      t = (target - t <= ode_dt) ? target : t + h;
    }
    traj.times.push_back(target);
    traj.mean.emplace_back(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(m));
    traj.variance.emplace_back(y.begin() + static_cast<std::ptrdiff_t>(m), y.end());
  }
  return traj;
}

MomentTrajectory mkv_moment_closed_form(const DriftDiffusionSpec &spec,
                                        std::span<const double> mean0,
                                        std::span<const double> variance0,
                                        std::span<const double> times) {
  const auto c = linear_coefficients(spec);
  check_moment_inputs(spec, mean0, variance0);
  const std::size_t m = spec.dim;
  const double a = c.lambda + c.kappa;
  MomentTrajectory traj;
  for (double t : times) {
    std::vector<double> mean(m), var(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double s2 = c.noise[k] * c.noise[k];
      mean[k] = mean0[k] * std::exp(-c.lambda * t);
      if (a == 0.0) {
        var[k] = variance0[k] + s2 * t;
      } else {
        const double v_inf = s2 / (2.0 * a);
        var[k] = v_inf + (variance0[k] - v_inf) * std::exp(-2.0 * a * t);
      }
    }
    traj.times.push_back(t);
    traj.mean.push_back(std::move(mean));
    traj.variance.push_back(std::move(var));
  }
  return traj;
}

} // namespace mfchaos
