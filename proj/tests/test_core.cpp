#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "mfchaos/core.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/rng.hpp"
#include "test_support.hpp"

using namespace mfchaos;
using mfchaos::testing::ks_statistic;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of seed, id and position") {
  RngStream a(42, stream_id(1, 2, 3)), b(42, stream_id(1, 2, 3));
  std::vector<std::uint64_t> xa, xb;
  for (int k = 0; k < 100; ++k) {
    xa.push_back(a.next_u64());
    xb.push_back(b.next_u64());
  }
  CHECK(xa == xb);
  auto c = RngStream::at(42, stream_id(1, 2, 3), 37);
  CHECK(c.next_u64() == xa[37]);
  RngStream other(42, stream_id(1, 2, 4));
  CHECK(other.next_u64() != xa[0]);
  RngStream other_seed(43, stream_id(1, 2, 3));
  CHECK(other_seed.next_u64() != xa[0]);
  CHECK(a.draw_counter() == 100);
}

TEST_CASE("stream ids partition tag, group and replica") {
  CHECK(stream_id(1, 0, 0) == (std::uint64_t{1} << 48));
  CHECK(stream_id(0, 1, 0) == (std::uint64_t{1} << 32));
  CHECK(stream_id(0, 0, 7) == 7);
  CHECK(stream_id(3, 5, 9) != stream_id(3, 9, 5));
}

TEST_CASE("uniform and normal variates have the right laws") {
  RngStream rng(7, 1);
  std::vector<double> u(100000), z(100000);
  for (double &x : u) x = rng.uniform();
  for (double &x : z) x = rng.normal();
  CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);
  CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
  CHECK(ks_statistic(u, [](double x) { return x; }) < 0.01);
  CHECK(ks_statistic(z, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }) < 0.01);
  const double var = mfchaos::testing::variance_of(z);
  CHECK(var > 0.98);
  CHECK(var < 1.02);
}

TEST_CASE("exponential variate mean and uniform_index range") {
  RngStream rng(9, 2);
  double s = 0.0;
  for (int k = 0; k < 100000; ++k) s += rng.exponential(4.0);
  CHECK(s / 100000 == doctest::Approx(0.25).epsilon(0.02));
  std::vector<int> counts(5, 0);
  for (int k = 0; k < 50000; ++k) ++counts[rng.uniform_index(5)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 4 * std::sqrt(8000.0));
  CHECK_THROWS(rng.exponential(0.0));
}

TEST_CASE("particle state and empirical measure") {
  ParticleState s(1, std::vector<double>{0.0, 0.0});
  const auto mu = empirical_from_state(s);
  CHECK(mu.size() == 2);
  CHECK(mu.weight() == 0.5);
  CHECK(mu.atom(0)[0] == 0.0);

  ParticleState p(2, std::vector<double>{1.0, 0.0, -1.0, 0.0});
  const auto nu = empirical_from_state(p);
  CHECK(nu.size() == 2);
  CHECK(nu.dim() == 2);
  CHECK(nu.atom(1)[0] == -1.0);
  CHECK_THROWS(ParticleState(2, std::vector<double>{1.0, 2.0, 3.0}));
}

TEST_CASE("empirical functionals are permutation symmetric") {
  RngStream rng(3, 3);
  std::vector<double> atoms(2 * 50);
  for (double &x : atoms) x = rng.normal();
  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 49; k > 0; --k) std::swap(perm[k], perm[rng.uniform_index(k + 1)]);
  std::vector<double> shuffled(atoms.size());
  for (std::size_t i = 0; i < 50; ++i) {
    shuffled[2 * i] = atoms[2 * perm[i]];
    shuffled[2 * i + 1] = atoms[2 * perm[i] + 1];
  }
  const EmpiricalMeasure a(2, atoms), b(2, shuffled);
  const auto f = [](std::span<const double> z) { return std::sin(z[0]) * z[1]; };
  CHECK(a.average(f) == doctest::Approx(b.average(f)).epsilon(1e-14));
  CHECK(moment(a, 3.0).value == doctest::Approx(moment(b, 3.0).value).epsilon(1e-14));
}

TEST_CASE("moments") {
  CHECK(moment(EmpiricalMeasure(1, {0.0}), 5.0).value == 1.0);
  CHECK(moment(EmpiricalMeasure(1, {0.0, 0.0}), 2.0).value == 1.0);
  CHECK(moment(EmpiricalMeasure(2, {3.0, 4.0}), 2.0).value == doctest::Approx(26.0));
  const EmpiricalMeasure mu(1, {0.5, -2.0, 1.0});
  CHECK(moment(mu, 1.0).value <= moment(mu, 2.0).value);
  CHECK(moment(mu, 2.0).value <= moment(mu, 4.0).value);
}

TEST_CASE("quantile initialization") {
  const auto id = [](double p) { return p; };
  const auto two = quantile_init_1d(id, 2);
  CHECK(two.coords()[0] == 0.25);
  CHECK(two.coords()[1] == 0.75);
  const auto four = quantile_init_1d(id, 4);
  CHECK(four.coords()[0] == 0.125);
  CHECK(four.coords()[3] == 0.875);
  const auto g = quantile_init_1d(normal_quantile, 2);
  CHECK(g.coords()[0] == doctest::Approx(-0.6744897501960817).epsilon(1e-12));
  CHECK(g.coords()[1] == doctest::Approx(0.6744897501960817).epsilon(1e-12));
}

TEST_CASE("gaussian samples") {
  RngStream rng(5, 5);
  const std::vector<double> mean{2.0, -1.0}, zero{0.0, 0.0};
  const auto s = gaussian_sample_state(mean, zero, 10, rng);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(s.particle(i)[0] == 2.0);
    CHECK(s.particle(i)[1] == -1.0);
  }
  RngStream r1(11, 4), r2(11, 4);
  const std::vector<double> m1{0.0}, v1{1.0};
  CHECK(gaussian_sample_state(m1, v1, 100, r1) == gaussian_sample_state(m1, v1, 100, r2));
  RngStream r3(12, 4);
  const auto big = gaussian_sample_state(m1, v1, 100000, r3);
  std::vector<double> x(big.coords().begin(), big.coords().end());
  const double var = mfchaos::testing::variance_of(x);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("momentum and energy totals") {
  ParticleState s(2, std::vector<double>{1.0, 2.0, -3.0, 0.5});
  const auto p = total_momentum(s);
  CHECK(p[0] == -2.0);
  CHECK(p[1] == 2.5);
  CHECK(total_energy(s) == doctest::Approx(1 + 4 + 9 + 0.25));
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("pairwise sum") {
  std::vector<double> x(1001);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = 1.0 / static_cast<double>(k + 1);
  CHECK(pairwise_sum(x) == doctest::Approx(std::accumulate(x.begin(), x.end(), 0.0)).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
