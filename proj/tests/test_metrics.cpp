#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mfchaos/metrics.hpp"

using namespace mfchaos;

namespace {

EmpiricalMeasure random_measure(std::size_t dim, std::size_t n, RngStream &rng, double scale = 1.0,
                                double shift = 0.0) {
  std::vector<double> v(dim * n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = scale * rng.normal() + (i % dim == 0 ? shift : 0.0);
  }
  return EmpiricalMeasure(dim, std::move(v));
}

double brute_force_w2_squared(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const double d = a.atom(i)[k] - b.atom(p[i])[k];
        s += d * d;
      }
    }
    best = std::min(best, s / static_cast<double>(n));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Integral of |F_a - F_b| over the line for 1-D samples (W_1 by the CDF formula).
double cdf_w1(std::vector<double> a, std::vector<double> b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  std::sort(pts.begin(), pts.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto cdf = [](const std::vector<double> &s, double x) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) /
           static_cast<double>(s.size());
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    total += std::abs(cdf(a, pts[k]) - cdf(b, pts[k])) * (pts[k + 1] - pts[k]);
  }
  return total;
}

} // namespace

TEST_CASE("W1 examples") {
  CHECK(w1_exact_1d(EmpiricalMeasure(1, {0.0}), EmpiricalMeasure(1, {1.0})) == 1.0);
  CHECK(w1_exact_1d(EmpiricalMeasure(1, {0.3, 2.0}), EmpiricalMeasure(1, {2.0, 0.3})) == 0.0);
  CHECK(w1_exact_1d(EmpiricalMeasure(1, {0.0, 2.0}), EmpiricalMeasure(1, {1.0, 3.0})) == 1.0);
}

TEST_CASE("quantile coupling handles unequal counts") {
  RngStream rng(1, 1);
  for (int k = 0; k < 200; ++k) {
    const auto n = 1 + rng.uniform_index(12), m = 1 + rng.uniform_index(12);
    const auto a = random_measure(1, n, rng), b = random_measure(1, m, rng, 2.0, 0.5);
    const std::vector<double> va(a.atoms().begin(), a.atoms().end());
    const std::vector<double> vb(b.atoms().begin(), b.atoms().end());
    CHECK(wq_power_1d(a, b, 1.0) == doctest::Approx(cdf_w1(va, vb)).epsilon(1e-12));
  }
}

TEST_CASE("W1 axioms and ordering against W2") {
  RngStream rng(2, 1);
  for (int k = 0; k < 300; ++k) {
    const auto n = 2 + rng.uniform_index(30);
    const auto a = random_measure(1, n, rng), b = random_measure(1, n, rng, 1.5),
               c = random_measure(1, n, rng, 0.5, 1.0);
    CHECK(w1_exact_1d(a, b) == w1_exact_1d(b, a));
    CHECK(w1_exact_1d(a, b) <= w1_exact_1d(a, c) + w1_exact_1d(c, b) + 1e-10);
    CHECK(w1_exact_1d(a, b) <= std::sqrt(w2_exact_matching(a, b).cost) + 1e-12);
    CHECK(w1_exact_1d(a, a) == 0.0);
  }
}

TEST_CASE("exact matching examples") {
  RngStream rng(3, 1);
  const auto a = random_measure(2, 9, rng);
  const auto same = w2_exact_matching(a, a);
  CHECK(same.cost == 0.0);
  for (std::size_t i = 0; i < 9; ++i) CHECK(same.assignment[i] == i);
  const auto line = w2_exact_matching(EmpiricalMeasure(1, {0.0, 2.0}), EmpiricalMeasure(1, {3.0, 1.0}));
  CHECK(line.cost == doctest::Approx(1.0));
  CHECK(line.assignment == std::vector<std::size_t>{1, 0});
  CHECK_THROWS_AS(w2_exact_matching(random_measure(2, 3, rng), random_measure(2, 4, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(w2_exact_matching(random_measure(2, kAssignmentBudget + 1, rng),
                                    random_measure(2, kAssignmentBudget + 1, rng)),
                  std::length_error);
}

TEST_CASE("exact matching equals the permutation minimum") {
  RngStream rng(4, 1);
  for (int k = 0; k < 300; ++k) {
    const auto n = 1 + rng.uniform_index(7);
    const auto dim = 2 + rng.uniform_index(2);
    const auto a = random_measure(dim, n, rng), b = random_measure(dim, n, rng, 1.3, 0.4);
    const auto plan = w2_exact_matching(a, b);
    CHECK(plan.cost == doctest::Approx(brute_force_w2_squared(a, b)).epsilon(1e-12));
    std::vector<std::size_t> sorted = plan.assignment;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("W2 axioms in d = 2") {
  RngStream rng(5, 1);
  for (int k = 0; k < 100; ++k) {
    const auto n = 2 + rng.uniform_index(20);
    const auto a = random_measure(2, n, rng), b = random_measure(2, n, rng, 2.0),
               c = random_measure(2, n, rng, 1.0, 1.0);
    const double ab = std::sqrt(w2_exact_matching(a, b).cost);
    CHECK(ab == doctest::Approx(std::sqrt(w2_exact_matching(b, a).cost)).epsilon(1e-12));
    CHECK(ab <= std::sqrt(w2_exact_matching(a, c).cost) + std::sqrt(w2_exact_matching(c, b).cost) + 1e-10);
  }
}

TEST_CASE("assignment solver on a hand matrix") {
  const double c[3][3] = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  const auto a = solve_assignment(3, [&](std::size_t i, std::size_t j) { return c[i][j]; });
  CHECK(c[0][a[0]] + c[1][a[1]] + c[2][a[2]] == 5.0);
}

TEST_CASE("sliced W2") {
  RngStream rng(6, 1);
  const auto a = random_measure(2, 50, rng);
  const auto self = w2_sliced(a, a, 32, rng);
  CHECK(self.value == 0.0);
  CHECK(self.std_error == 0.0);

  const auto x = random_measure(1, 40, rng), y = random_measure(1, 40, rng, 2.0);
  const auto s1 = w2_sliced(x, y, 16, rng);
  CHECK(s1.value == doctest::Approx(std::sqrt(w2_exact_matching(x, y).cost)).epsilon(1e-12));

  // Translated Gaussians: sliced W2^2 = |s|^2 E cos^2 = |s|^2 / 2 in d = 2.
  const auto g = random_measure(2, 512, rng), h = random_measure(2, 512, rng, 1.0, 3.0);
  const auto sl = w2_sliced(g, h, 256, rng);
  const double exact = std::sqrt(w2_exact_matching(g, h).cost);
  CHECK(sl.value == doctest::Approx(exact / std::sqrt(2.0)).epsilon(0.10));
}

TEST_CASE("Toscani norm") {
  const XiGrid grid(40.0, 4096);
  const EmpiricalMeasure d0(1, {0.0}), d1(1, {1.0});
  CHECK(toscani_norm(d0, d0, 3.0, grid).value == 0.0);
  double brute = 0.0;
  for (int k = 0; k <= 2000000; ++k) {
    const double xi = -40.0 + 80.0 * k / 2000000.0;
    brute = std::max(brute, 2.0 * std::abs(std::sin(xi / 2)) / std::pow(1 + xi * xi, 1.5));
  }
  const auto t = toscani_norm(d0, d1, 3.0, grid);
  CHECK(t.value == doctest::Approx(brute).epsilon(1e-4));
  CHECK_FALSE(t.at_boundary);
}

TEST_CASE("negative Sobolev norm") {
  const XiGrid grid(40.0, 4096);
  const EmpiricalMeasure d0(1, {0.0}), d1(1, {1.0});
  CHECK(h_neg_sobolev_norm(d0, d0, 1.0, grid).value == 0.0);
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double xi) { return (2.0 - 2.0 * std::cos(xi)) / (1.0 + xi * xi); }, -40.0, 40.0, 15,
      1e-13);
  const auto h = h_neg_sobolev_norm(d0, d1, 1.0, grid);
  CHECK(h.value == doctest::Approx(std::sqrt(integral)).epsilon(1e-4));

  const auto fa = gaussian_spectrum(grid, 0.0, 1.0), fb = gaussian_spectrum(grid, 0.5, 2.0);
  std::vector<std::complex<double>> far(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) far[k] = 2.0 * fb.values[k] - fa.values[k];
  const GridSpectrum fc(grid, far);
  CHECK(h_neg_sobolev_norm(fa, fc, 2.0).value ==
        doctest::Approx(2.0 * h_neg_sobolev_norm(fa, fb, 2.0).value).epsilon(1e-12));
  CHECK_THROWS(h_neg_sobolev_norm(fa, fb, 0.5));
}

TEST_CASE("histogram total variation") {
  const std::vector<double> edges{0.0, 1.0, 2.0};
  const EmpiricalMeasure a(1, {0.0, 0.0, 1.0, 1.0}), b(1, {0.0, 1.0, 1.0, 1.0});
  CHECK(tv_histogram(a, a, edges) == 0.0);
  CHECK(tv_histogram(a, b, edges) == doctest::Approx(0.5));
  const EmpiricalMeasure lo(1, {0.1, 0.2}), hi(1, {1.5, 5.0});
  CHECK(tv_histogram(lo, hi, edges) == doctest::Approx(2.0));
  const EmpiricalMeasure edge(1, {2.0}), out(1, {2.5});
  CHECK(tv_histogram(edge, out, edges) == doctest::Approx(2.0));
}

TEST_CASE("Omega_N estimator edge cases") {
  OmegaOptions opt;
  opt.replicas = 20;
  const Sampler dirac = [](std::size_t n, RngStream &) { return ParticleState(2, n); };
  const auto zero = omega_n_estimator(dirac, 32, opt);
  CHECK(zero.mean == 0.0);
  CHECK(zero.std_error == 0.0);

  // Replicas and reference carry the same atoms in the same proportions.
  const Sampler cycle = [](std::size_t n, RngStream &) {
    ParticleState s(1, n);
    for (std::size_t i = 0; i < n; ++i) s.particle(i)[0] = std::sin(static_cast<double>(i % 4));
    return s;
  };
  CHECK(omega_n_estimator(cycle, 64, opt).mean == 0.0);
  OmegaOptions small = opt;
  small.reference_size = 64;
  CHECK_THROWS(omega_n_estimator(cycle, 64, small));
}

TEST_CASE("Omega_N decreases and does not depend on workers") {
  const Sampler gauss = [](std::size_t n, RngStream &rng) {
    const std::vector<double> m{0.0}, v{1.0};
    return gaussian_sample_state(m, v, n, rng);
  };
  OmegaOptions opt;
  opt.replicas = 50;
  const auto a = omega_n_estimator(gauss, 32, opt);
  const auto b = omega_n_estimator(gauss, 512, opt);
  CHECK(a.estimator == "exact_sorted_1d");
  CHECK(b.mean < a.mean / 4);
  opt.workers = 3;
  const auto c = omega_n_estimator(gauss, 512, opt);
  CHECK(c.replica_values == b.replica_values);
  CHECK(c.mean == b.mean);
}
