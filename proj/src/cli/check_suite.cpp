#include "mfchaos/cli/check_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfchaos/chaos_harness.hpp"
#include "mfchaos/inelastic_thermostat.hpp"
#include "mfchaos/kac_elastic.hpp"
#include "mfchaos/mckean_vlasov.hpp"
#include "mfchaos/metrics.hpp"
#include "mfchaos/observables.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/spectral.hpp"

namespace mfchaos::cli {

namespace {

struct Recorder {
  CsvWriter &csv;
  bool all = true;
  void check(const std::string &name, double value, double threshold) {
    const bool pass = value <= threshold;
    all = all && pass;
    csv.row({name, value, threshold, std::string(pass ? "pass" : "fail")});
  }
};

ObservableProduct random_observable(std::size_t ell, std::size_t dim, RngStream &rng) {
  const auto names = Observable::catalog();
  std::vector<Observable> factors;
  for (std::size_t j = 0; j < ell; ++j) {
    const auto name = names[rng.uniform_index(names.size())];
    const auto coord = rng.uniform_index(dim);
    const auto probe = Observable::parse(name);
    factors.emplace_back(probe.kind(), static_cast<std::size_t>(coord));
  }
  return ObservableProduct(std::move(factors));
}

double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

} // namespace

bool run_check_suite(std::uint64_t seed, std::size_t scale, std::size_t workers, CsvWriter &csv) {
  (void)workers;
  scale = std::max<std::size_t>(scale, 1);
  csv.columns({"check", "value", "threshold", "status"});
  Recorder rec{csv};

  // Elastic conservation over a run and per collision.
  {
    RngStream rng(seed, stream_id(stream_tag::auxiliary, 1, 0));
    const std::vector<double> mean{0.0, 0.0, 0.0}, var{1.0, 1.0, 1.0};
    const auto init = gaussian_sample_state(mean, var, 200, rng);
    KacSimulator sim(init, AngularKernel::isotropic(3), rng);
    const auto p0 = total_momentum(init);
    const double e0 = total_energy(init);
    double worst_collision = 0.0;
    for (std::size_t k = 0; k < 20000 * scale; ++k) {
      const auto before = sim.state();
      const auto ev = sim.step();
      const auto a = before.particle(ev.i), b = before.particle(ev.j);
      const auto c = sim.state().particle(ev.i), d = sim.state().particle(ev.j);
      const double pe = squared_norm(a) + squared_norm(b);
      double dm = 0.0;
      for (std::size_t x = 0; x < 3; ++x) dm = std::max(dm, std::abs(a[x] + b[x] - c[x] - d[x]));
      const double de = std::abs(squared_norm(c) + squared_norm(d) - pe);
      worst_collision = std::max({worst_collision, de / pe, dm / std::sqrt(pe)});
    }
    const auto p1 = total_momentum(sim.state());
    const double scale_p = std::sqrt(e0);
    rec.check("kac_momentum_drift_relative", max_abs_diff(p0, p1) / scale_p, 1e-8);
    rec.check("kac_energy_drift_relative", std::abs(total_energy(sim.state()) - e0) / e0, 1e-8);
    rec.check("kac_per_collision_relative", worst_collision, 1e-12);
  }

  // Inelastic collisions: momentum kept, energy and relative speed never grow.
  {
    RngStream rng(seed, stream_id(stream_tag::auxiliary, 2, 0));
    const auto kernel = AngularKernel::isotropic(3);
    double worst_growth = 0.0, worst_momentum = 0.0;
    std::vector<double> vi(3), vj(3), uh(3), sigma(3);
    for (std::size_t k = 0; k < 20000 * scale; ++k) {
      for (std::size_t x = 0; x < 3; ++x) {
        vi[x] = rng.normal();
        vj[x] = rng.normal();
      }
      relative_direction(vi, vj, uh);
      sample_sigma(kernel, uh, rng, sigma);
      const double alpha = 0.05 + 0.9 * rng.uniform();
      const auto [a, b] = collide_inelastic_copy(vi, vj, sigma, alpha);
      double u0 = 0.0, u1 = 0.0;
      for (std::size_t x = 0; x < 3; ++x) {
        u0 += (vi[x] - vj[x]) * (vi[x] - vj[x]);
        u1 += (a[x] - b[x]) * (a[x] - b[x]);
        worst_momentum = std::max(worst_momentum, std::abs(vi[x] + vj[x] - a[x] - b[x]));
      }
      const double e0 = squared_norm(vi) + squared_norm(vj);
      const double e1 = squared_norm(a) + squared_norm(b);
      worst_growth = std::max({worst_growth, (e1 - e0) / e0, (u1 - u0) / u0});
    }
    rec.check("inelastic_energy_or_speed_growth", std::max(worst_growth, 0.0), 1e-12);
    rec.check("inelastic_momentum_error", worst_momentum, 1e-12);
  }

  // Symmetrization bound, exhaustive, plus agreement with N! enumeration.
  {
    RngStream rng(seed, stream_id(stream_tag::auxiliary, 3, 0));
    double worst_ratio = 0.0, worst_perm = 0.0;
    const std::size_t ns[] = {4, 6, 8};
    for (std::size_t k = 0; k < 200 * scale; ++k) {
      const std::size_t n = ns[rng.uniform_index(3)];
      const std::size_t ell = 1 + rng.uniform_index(std::min<std::size_t>(3, n / 2));
      const std::size_t dim = 1 + rng.uniform_index(3);
      ParticleState z(dim, n);
      for (double &x : z.coords()) x = 2.0 * rng.normal();
      const auto obs = random_observable(ell, dim, rng);
      const auto g = symmetrization_gap(z, obs);
      worst_ratio = std::max(worst_ratio, g.gap / g.bound);
      if (n <= 6) {
        worst_perm = std::max(worst_perm, std::abs(symmetrized_by_permutations(z, obs) -
                                                   g.symmetrized));
      }
    }
    rec.check("symmetrization_gap_over_bound", worst_ratio, 1.0);
    rec.check("symmetrization_tuple_vs_permutation", worst_perm, 1e-12);
  }

  // Metric axioms and exact matching.
  {
    RngStream rng(seed, stream_id(stream_tag::auxiliary, 4, 0));
    double sym = 0.0, tri = 0.0, order = 0.0, self = 0.0, perm_gap = 0.0;
    for (std::size_t k = 0; k < 200 * scale; ++k) {
      const std::size_t n = 2 + rng.uniform_index(20);
      auto sample = [&](std::size_t dim, std::size_t count) {
        std::vector<double> v(dim * count);
        for (double &x : v) x = rng.normal() * 1.5 + rng.uniform();
        return EmpiricalMeasure(dim, std::move(v));
      };
      const auto a = sample(1, n), b = sample(1, n), c = sample(1, n);
      const double ab = w1_exact_1d(a, b), ba = w1_exact_1d(b, a);
      sym = std::max(sym, std::abs(ab - ba));
      tri = std::max(tri, ab - (w1_exact_1d(a, c) + w1_exact_1d(c, b)));
      const double w2ab = std::sqrt(w2_exact_matching(a, b).cost);
      order = std::max(order, ab - w2ab);
      self = std::max(self, w1_exact_1d(a, a));

      const std::size_t m = 2 + rng.uniform_index(5);
      const auto x = sample(2, m), y = sample(2, m);
      const auto plan = w2_exact_matching(x, y);
      std::vector<std::size_t> p(m);
      std::iota(p.begin(), p.end(), 0);
      double best = 1e300;
      do {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const auto u = x.atom(i), v = y.atom(p[i]);
          s += (u[0] - v[0]) * (u[0] - v[0]) + (u[1] - v[1]) * (u[1] - v[1]);
        }
        best = std::min(best, s / static_cast<double>(m));
      } while (std::next_permutation(p.begin(), p.end()));
      perm_gap = std::max(perm_gap, std::abs(plan.cost - best));
    }
    rec.check("w1_symmetry", sym, 0.0);
    rec.check("w1_triangle_excess", std::max(tri, 0.0), 1e-10);
    rec.check("w1_minus_w2", std::max(order, 0.0), 1e-12);
    rec.check("w1_self_distance", self, 0.0);
    rec.check("w2_matching_vs_permutations", perm_gap, 1e-12);
  }

  // Spectral invariants on a short inelastic run with bath.
  {
    const XiGrid grid(40.0, 512);
    SpectralInvariants inv;
    spectral_evolve(gaussian_spectrum(grid, 0.0, 1.0), BobylevParams{}, 0.25 * scale, 1e-3, &inv);
    rec.check("spectral_mass_error", inv.max_mass_error, 1e-8);
    rec.check("spectral_hermitian_error", inv.max_hermitian_error, 1e-8);
    rec.check("spectral_modulus_excess", std::max(inv.max_modulus - 1.0, 0.0), 1e-8);
  }

  // Moment oracle: RK4 against the explicit solution.
  {
    const auto spec = DriftDiffusionSpec::isotropic(2, -0.5, 0.8, InteractionKernel::linear(1.5));
    const double mean0[] = {1.0, -2.0}, var0[] = {0.3, 2.0};
    const double times[] = {0.0, 0.5, 1.0, 2.0};
    const auto rk = mkv_moment_oracle(spec, mean0, var0, times);
    const auto cf = mkv_moment_closed_form(spec, mean0, var0, times);
    double worst = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      worst = std::max({worst, max_abs_diff(rk.mean[t], cf.mean[t]),
                        max_abs_diff(rk.variance[t], cf.variance[t])});
    }
    rec.check("mkv_moment_rk4_vs_closed_form", worst, 1e-9);
  }
  return rec.all;
}

} // namespace mfchaos::cli
