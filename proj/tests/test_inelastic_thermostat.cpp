#include <cmath>

#include "doctest.h"
#include "mfchaos/inelastic_thermostat.hpp"
#include "test_support.hpp"

using namespace mfchaos;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<double> random_unit(std::size_t d, RngStream &rng) {
  std::vector<double> u(d);
  for (double &x : u) x = rng.normal();
  const double n = std::sqrt(dot(u, u));
  for (double &x : u) x /= n;
  return u;
}

} // namespace

TEST_CASE("inelastic collision examples in d=1") {
  const std::vector<double> a{1.0}, b{-1.0};
  const auto [p, q] = collide_inelastic_copy(a, b, std::vector<double>{1.0}, 0.5);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(q[0] == doctest::Approx(-1.0));
  const auto [x, y] = collide_inelastic_copy(a, b, std::vector<double>{-1.0}, 0.5);
  CHECK(x[0] == doctest::Approx(-0.5));
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(x[0] * x[0] + y[0] * y[0] == doctest::Approx(0.5));
}

TEST_CASE("alpha = 1 reproduces the elastic rule") {
  RngStream rng(1, 1);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> a(3), b(3);
    for (std::size_t x = 0; x < 3; ++x) {
      a[x] = rng.normal();
      b[x] = rng.normal();
    }
    const auto s = random_unit(3, rng);
    const auto [c, d] = collide_inelastic_copy(a, b, s, 1.0);
    const auto [e, f] = collide_elastic_copy(a, b, s);
    for (std::size_t x = 0; x < 3; ++x) {
      worst = std::max({worst, std::abs(c[x] - e[x]), std::abs(d[x] - f[x])});
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("relative speed contracts, with equality only at sigma = u_hat") {
  RngStream rng(2, 1);
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> a(3), b(3), uh(3);
    for (std::size_t x = 0; x < 3; ++x) {
      a[x] = rng.normal();
      b[x] = rng.normal();
    }
    relative_direction(a, b, uh);
    const auto s = random_unit(3, rng);
    const double alpha = 0.05 + 0.9 * rng.uniform();
    const auto [c, d] = collide_inelastic_copy(a, b, s, alpha);
    double u0 = 0.0, u1 = 0.0;
    for (std::size_t x = 0; x < 3; ++x) {
      u0 += (a[x] - b[x]) * (a[x] - b[x]);
      u1 += (c[x] - d[x]) * (c[x] - d[x]);
    }
    CHECK(u1 <= u0 * (1 + 1e-12));
    if (dot(s, uh) < 1.0 - 1e-6) CHECK(u1 < u0);
  }
  std::vector<double> a{1.0, 2.0}, b{0.0, -1.0}, uh(2);
  relative_direction(a, b, uh);
  const auto [c, d] = collide_inelastic_copy(a, b, uh, 0.3);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(-1.0));
}

TEST_CASE("expected pair energy change matches Monte Carlo") {
  const auto kernel = AngularKernel::isotropic(3);
  RngStream rng(3, 1);
  const std::vector<double> a{1.0, 0.5, -0.3}, b{-0.8, 0.1, 0.9};
  std::vector<double> uh(3);
  relative_direction(a, b, uh);
  double u2 = 0.0;
  for (std::size_t x = 0; x < 3; ++x) u2 += (a[x] - b[x]) * (a[x] - b[x]);
  const double e0 = dot(a, a) + dot(b, b);
  const int samples = 400000;
  std::vector<double> de(samples);
  for (auto &v : de) {
    const auto s = sample_sigma(kernel, uh, rng);
    const auto [c, d] = collide_inelastic_copy(a, b, s, 0.8);
    v = dot(c, c) + dot(d, d) - e0;
  }
  const double expected = expected_pair_energy_change(0.8, 0.0, u2);
  CHECK(expected == doctest::Approx(-(1 - 0.64) * u2 / 4));
  CHECK(std::abs(mfchaos::testing::mean_of(de) - expected) < 0.01 * std::abs(expected));
}

TEST_CASE("steady temperature oracle") {
  const auto iso = AngularKernel::isotropic(3);
  const auto ordered = steady_temperature_oracle({0.8, 1.0, 3}, iso, PairConvention::Ordered);
  // g = 2 (1 - 0.64) / 4 = 0.18, T = 2 nu / g.
  CHECK(ordered.value == doctest::Approx(2.0 / 0.18));
  CHECK(ordered.relaxation_rate == doctest::Approx(0.18));
  const auto unordered = steady_temperature_oracle({0.8, 1.0, 3}, iso, PairConvention::Unordered);
  CHECK(unordered.value == doctest::Approx(2.0 * ordered.value));
  const auto elastic = steady_temperature_oracle({1.0, 1.0, 3}, iso);
  CHECK(elastic.diverges);
  CHECK(std::isinf(elastic.value));
  const auto cold = steady_temperature_oracle({0.8, 0.0, 3}, iso);
  CHECK(cold.value == 0.0);
  const double t = balance_temperature(ordered, 1.0, 1.0, 3.0);
  CHECK(t == doctest::Approx(ordered.value + (1.0 - ordered.value) * std::exp(-0.18 * 3.0)));
  CHECK_THROWS(RestitutionParams{1.5, 1.0, 3}.validate());
  CHECK_THROWS(RestitutionParams{0.5, -1.0, 3}.validate());
}

TEST_CASE("without bath, energy never increases") {
  RngStream rng(4, 1);
  const std::vector<double> m{0, 0, 0}, v{1, 1, 1};
  const auto init = gaussian_sample_state(m, v, 200, rng);
  ThermostatSimulator sim(init, AngularKernel::isotropic(3), {0.7, 0.0, 3}, rng);
  double worst = -1.0;
  std::size_t seen = 0;
  sim.set_collision_observer([&](double de) {
    worst = std::max(worst, de);
    ++seen;
  });
  double previous = temperature(sim.state());
  for (int k = 1; k <= 20; ++k) {
    sim.advance_to(0.1 * k);
    const double now = temperature(sim.state());
    CHECK(now <= previous);
    previous = now;
  }
  CHECK(seen > 0);
  CHECK(worst <= 0.0);
}

TEST_CASE("grazing collisions leave pure Brownian growth") {
  const std::size_t n = 2000;
  ParticleState init(3, n);
  RngStream rng(5, 1);
  const auto kernel = AngularKernel::from_name("grazing_spike", 3, 1e-3);
  const std::vector<double> t{0.5};
  const auto out = simulate_thermostat(init, kernel, {0.9, 1.0, 3}, 0.5, t, rng);
  std::vector<double> x(out[0].coords().begin(), out[0].coords().end());
  CHECK(mfchaos::testing::variance_of(x) == doctest::Approx(2.0 * 1.0 * 0.5).epsilon(0.05));
}

TEST_CASE("momentum is a centered random walk of variance 2 nu N t") {
  const std::size_t n = 100, reps = 2000;
  std::vector<double> px(reps);
  const auto kernel = AngularKernel::isotropic(3);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(6, stream_id(1, 0, static_cast<std::uint32_t>(r)));
    const std::vector<double> m{0, 0, 0}, v{1, 1, 1};
    const auto init = gaussian_sample_state(m, v, n, rng);
    const double p0 = total_momentum(init)[0];
    const auto out = simulate_thermostat(init, kernel, {0.8, 1.0, 3}, 1.0,
                                         std::vector<double>{1.0}, rng);
    px[r] = total_momentum(out[0])[0] - p0;
  }
  CHECK(std::abs(mfchaos::testing::mean_of(px)) < 3 * mfchaos::testing::std_error_of(px));
  CHECK(mfchaos::testing::variance_of(px) == doctest::Approx(2.0 * n * 1.0).epsilon(0.10));
}

TEST_CASE("thermostat at t_end = 0 returns the initial state") {
  RngStream rng(7, 1);
  const ParticleState s(1, std::vector<double>{0.3, -0.2});
  const auto out = simulate_thermostat(s, AngularKernel::two_point(0.5, 0.5), {0.8, 1.0, 1}, 0.0,
                                       std::vector<double>{0.0}, rng);
  CHECK(out[0].coords()[0] == 0.3);
}

TEST_CASE("temperature relaxes to a plateau") {
  RngStream rng(8, 1);
  const std::vector<double> m{0, 0, 0}, v{1, 1, 1};
  const auto init = gaussian_sample_state(m, v, 2000, rng);
  std::vector<double> times;
  for (int k = 0; k <= 60; ++k) times.push_back(0.5 * k);
  const auto out =
      simulate_thermostat(init, AngularKernel::isotropic(3), {0.8, 1.0, 3}, 30.0, times, rng);
  // Slope of T over [20, 30] is statistically flat while the early slope is not.
  std::vector<double> late_t, late_T;
  for (std::size_t k = 40; k <= 60; ++k) {
    late_t.push_back(times[k]);
    late_T.push_back(temperature(out[k]));
  }
  const double mt = mfchaos::testing::mean_of(late_t), mT = mfchaos::testing::mean_of(late_T);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < late_t.size(); ++k) {
    sxy += (late_t[k] - mt) * (late_T[k] - mT);
    sxx += (late_t[k] - mt) * (late_t[k] - mt);
  }
  const double early_slope = (temperature(out[4]) - temperature(out[0])) / 2.0;
  CHECK(std::abs(sxy / sxx) < 0.05 * early_slope);
}
