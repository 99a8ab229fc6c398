// Acceptance runs. Every criterion recomputes its verdict from raw outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mfchaos/chaos_harness.hpp"
#include "mfchaos/cli/commands.hpp"
#include "mfchaos/cli/config.hpp"
#include "mfchaos/cli/csv.hpp"
#include "mfchaos/inelastic_thermostat.hpp"
#include "mfchaos/kac_elastic.hpp"
#include "mfchaos/metrics.hpp"
#include "mfchaos/observables.hpp"
#include "mfchaos/spectral.hpp"

using namespace mfchaos;
using cli::CsvWriter;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string csv;
  double seconds = 0.0;
};

std::string fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char *f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double mean_of(const std::vector<double> &x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_error_of(const std::vector<double> &x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

double slope_of(const std::vector<double> &x, const std::vector<double> &y) {
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

// Data rows of a CLI document keyed by column name; '#' lines are skipped.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;

  static Table parse(const std::string &csv) {
    Table t;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (t.names.empty()) {
        t.names = cells;
      } else {
        t.rows.push_back(cells);
      }
    }
    return t;
  }
  std::size_t col(const std::string &name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::runtime_error("missing column " + name);
    return static_cast<std::size_t>(it - names.begin());
  }
  double real(std::size_t r, const std::string &name) const { return std::stod(rows[r][col(name)]); }
  const std::string &text(std::size_t r, const std::string &name) const {
    return rows[r][col(name)];
  }
};

std::string run_cli(const std::string &command, const std::string &config, std::size_t workers) {
  cli::RunOptions opt;
  opt.workers = workers;
  return cli::run(command, cli::Config::parse(config), opt).csv;
}

std::string times_list(double from, double to, double step) {
  std::string s;
  const auto count = static_cast<int>(std::lround((to - from) / step));
  for (int k = 0; k <= count; ++k) {
    if (k) s += ", ";
    s += cli::format_real(from + step * k);
  }
  return s;
}

// Spectral invariants gathered from every spectral run, checked by criterion 10.
SpectralInvariants g_spectral;

// 1. Conservation over 10^6 elastic collisions.
Outcome conservation(std::size_t) {
  const std::size_t n = 1000, collisions = 1000000;
  RngStream init_rng(kSeed, stream_id(stream_tag::initial, 1, 0));
  const std::vector<double> mean{0.3, -0.2, 0.1}, var{1.0, 2.0, 0.5};
  const auto init = gaussian_sample_state(mean, var, n, init_rng);
  ParticleState shadow = init;
  KacSimulator sim(init, AngularKernel::isotropic(3),
                   RngStream(kSeed, stream_id(stream_tag::dynamics, 1, 0)));

  double worst_energy = 0.0, worst_momentum = 0.0;
  for (std::size_t e = 0; e < collisions; ++e) {
    const auto ev = sim.step();
    auto oi = shadow.particle(ev.i), oj = shadow.particle(ev.j);
    const auto ni = sim.state().particle(ev.i), nj = sim.state().particle(ev.j);
    double e_old = 0.0, e_new = 0.0, dp = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      e_old += oi[k] * oi[k] + oj[k] * oj[k];
      e_new += ni[k] * ni[k] + nj[k] * nj[k];
      dp = std::max(dp, std::abs((ni[k] + nj[k]) - (oi[k] + oj[k])));
    }
    const double speeds = std::sqrt(squared_norm(oi)) + std::sqrt(squared_norm(oj));
    worst_energy = std::max(worst_energy, std::abs(e_new - e_old) / e_old);
    worst_momentum = std::max(worst_momentum, dp / speeds);
    std::copy(ni.begin(), ni.end(), oi.begin());
    std::copy(nj.begin(), nj.end(), oj.begin());
  }

  double e0 = 0.0, e1 = 0.0, speed_sum = 0.0;
  std::vector<double> p0(3, 0.0), p1(3, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = init.particle(i), b = sim.state().particle(i);
    speed_sum += std::sqrt(squared_norm(a));
    for (std::size_t k = 0; k < 3; ++k) {
      e0 += a[k] * a[k];
      e1 += b[k] * b[k];
      p0[k] += a[k];
      p1[k] += b[k];
    }
  }
  double p_drift = 0.0;
  for (std::size_t k = 0; k < 3; ++k) p_drift = std::max(p_drift, std::abs(p1[k] - p0[k]));
  p_drift /= speed_sum;
  const double e_drift = std::abs(e1 - e0) / e0;

  CsvWriter csv;
  csv.columns({"collisions", "max_pair_energy_rel", "max_pair_momentum_rel", "energy_drift_rel",
               "momentum_drift_rel"});
  csv.row({std::uint64_t{sim.events()}, worst_energy, worst_momentum, e_drift, p_drift});
  Outcome o;
  o.pass = sim.events() == collisions && worst_energy <= 1e-12 && worst_momentum <= 1e-12 &&
           e_drift <= 1e-8 && p_drift <= 1e-8;
  o.detail = fmt2("per-collision energy %.2e, momentum %.2e", worst_energy, worst_momentum) +
             fmt2("; run drift energy %.2e, momentum %.2e", e_drift, p_drift);
  o.csv = csv.str();
  return o;
}

// Average of prod_j phi_j(z_{sigma(j)}) over all N! permutations sigma.
double permutation_average(const ParticleState &z, const ObservableProduct &obs) {
  std::vector<std::size_t> p(z.size());
  std::iota(p.begin(), p.end(), 0);
  double sum = 0.0;
  std::size_t count = 0;
  do {
    double prod = 1.0;
    for (std::size_t j = 0; j < obs.ell(); ++j) prod *= obs.factors()[j](z.particle(p[j]));
    sum += prod;
    ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return sum / static_cast<double>(count);
}

// 2. Symmetrization gap bound, exhaustive.
Outcome symmetrization_bound(std::size_t) {
  const auto catalog = Observable::catalog();
  RngStream rng(kSeed, stream_id(stream_tag::initial, 2, 0));
  CsvWriter csv;
  csv.columns({"instance", "N", "ell", "dim", "observable", "gap", "bound", "library_gap"});
  std::size_t violations = 0, disagreements = 0;
  double worst_fraction = 0.0;
  const std::size_t sizes[] = {4, 6, 8};
  for (std::size_t k = 0; k < 1000; ++k) {
    const std::size_t n = sizes[rng.uniform_index(3)];
    const std::size_t ell = 1 + rng.uniform_index(std::min<std::size_t>(3, n / 2));
    const std::size_t dim = 1 + rng.uniform_index(3);
    std::vector<Observable> factors;
    for (std::size_t j = 0; j < ell; ++j) {
      const auto &name = catalog[rng.uniform_index(catalog.size())];
      const std::size_t coordinate = rng.uniform_index(dim);
      const bool whole = name == "one" || name == "gauss_bump";
      factors.push_back(
          Observable::parse(whole ? name : name + ":" + std::to_string(coordinate)));
    }
    const ObservableProduct obs(factors);
    ParticleState z(dim, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double &x : z.particle(i)) x = 1.5 * rng.normal();
    }
    double poly = 1.0, sup = 1.0;
    for (const auto &phi : obs.factors()) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += phi(z.particle(i));
      poly *= s / static_cast<double>(n);
      sup *= phi.sup_norm();
    }
    const double gap = std::abs(poly - permutation_average(z, obs));
    const double bound = 2.0 * static_cast<double>(ell * ell) * sup / static_cast<double>(n);
    const auto lib = symmetrization_gap(z, obs);
    if (gap > bound) ++violations;
    if (!lib.exhaustive || std::abs(lib.gap - gap) > 1e-12) ++disagreements;
    if (bound > 0.0) worst_fraction = std::max(worst_fraction, gap / bound);
    csv.row({std::uint64_t{k}, std::uint64_t{n}, std::uint64_t{ell}, std::uint64_t{dim},
             obs.name(), gap, bound, lib.gap});
  }
  Outcome o;
  o.pass = violations == 0 && disagreements == 0;
  o.detail = std::to_string(violations) + " violations, " + std::to_string(disagreements) +
             " library disagreements in 1000 instances" +
             fmt("; largest gap/bound %.3f", worst_fraction);
  o.csv = csv.str();
  return o;
}

// 3. Omega_N rate ceiling.
Outcome omega_rate(std::size_t workers) {
  const std::string cfg = "dimension = 3\nn_values = 16, 64, 256, 1024, 4096\nreplicas = 200\n"
                          "seed = " + std::to_string(kSeed) + "\n";
  Outcome o;
  o.csv = run_cli("omega-n", cfg, workers);
  const auto t = Table::parse(o.csv);
  std::vector<double> x, y;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    x.push_back(std::log(t.real(r, "N")));
    y.push_back(std::log(t.real(r, "mean")));
  }
  const double slope = slope_of(x, y);
  const double ceiling = -2.0 / 7.0 + 0.02;
  o.pass = t.rows.size() == 5 && slope <= ceiling;
  o.detail = fmt2("fitted slope %.4f, ceiling %.4f", slope, ceiling);
  return o;
}

// 4. Elastic chaos decay.
Outcome chaos_decay(std::size_t workers) {
  const std::string cfg = "model = kac_elastic\ndimension = 3\ninitial = gaussian\n"
                          "initial_mean = 0, 0, 0\ninitial_variance = 3, 0.5, 0.5\nt_end = 4\n"
                          "n_values = 64, 256, 1024, 4096\n"
                          "observables = tanh:0*tanh:0, tanh:1*tanh:1\n"
                          "estimator = disjoint_blocks\nsample_budget = 2000000\n"
                          "n_ref = 65536\noracle_replicas = 16\nseed = " +
                          std::to_string(kSeed) + "\n";
  Outcome o;
  o.csv = run_cli("chaos-curve", cfg, workers);
  const auto t = Table::parse(o.csv);
  std::map<std::string, std::map<std::size_t, std::pair<double, double>>> curves;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    curves[t.text(r, "observable")][static_cast<std::size_t>(t.real(r, "N"))] = {
        t.real(r, "error"), t.real(r, "std_error")};
  }
  o.pass = curves.size() == 2;
  for (const auto &[name, c] : curves) {
    const auto [e64, s64] = c.at(64);
    const auto [e4096, s4096] = c.at(4096);
    const double z = (e64 / 2 - e4096) / std::hypot(s64 / 2, s4096);
    o.pass = o.pass && e4096 < e64 / 2 && z >= 2.0;
    o.detail += (o.detail.empty() ? "" : "; ") + name + fmt2(": error(64) %.3e, error(4096) %.3e", e64, e4096) +
                fmt(", z %.2f", z);
  }
  return o;
}

// 5. Tanaka contraction with coupled streams.
Outcome tanaka(std::size_t workers) {
  ModelConfig model;
  model.kind = ModelKind::KacElastic;
  model.dim = 3;
  model.kernel = AngularKernel::isotropic(3);
  const auto a = InitialLaw::gaussian({0, 0, 0}, {1, 1, 1});
  const auto b = InitialLaw::gaussian({1, 0, 0}, {2, 1, 0.5});
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  const auto check = tanaka_contraction_check(model, a, b, times, 10000, 16, kSeed, workers);
  CsvWriter csv;
  csv.columns({"time", "w2", "std_error"});
  const auto &p0 = check.points.front();
  double worst = -1e300;
  for (const auto &p : check.points) {
    csv.row({p.time, p.w2, p.std_error});
    const double pooled = std::hypot(p.std_error, p0.std_error);
    worst = std::max(worst, (p.w2 - p0.w2) / pooled);
  }
  Outcome o;
  o.pass = check.points.size() == times.size() && worst <= 2.0;
  o.detail = fmt2("W2(0) = %.4f, W2(2) = %.4f", p0.w2, check.points.back().w2) +
             fmt(", largest excess over W2(0) %.2f pooled SE", worst);
  o.csv = csv.str();
  return o;
}

// 6. Thermostat energy balance.
Outcome thermostat(std::size_t workers) {
  const double alpha = 0.8, nu = 1.0;
  const auto kernel = AngularKernel::isotropic(3);

  // Pre-validation: Monte Carlo energy loss of one collision against the closed form.
  RngStream rng(kSeed, stream_id(stream_tag::initial, 6, 0));
  const std::vector<double> va{1.0, 0.5, -0.3}, vb{-0.8, 0.1, 0.9};
  std::vector<double> uh(3);
  relative_direction(va, vb, uh);
  double u2 = 0.0;
  for (std::size_t k = 0; k < 3; ++k) u2 += (va[k] - vb[k]) * (va[k] - vb[k]);
  const double e0 = squared_norm(va) + squared_norm(vb);
  std::vector<double> de(1000000);
  for (double &v : de) {
    const auto s = sample_sigma(kernel, uh, rng);
    const auto [c, d] = collide_inelastic_copy(va, vb, s, alpha);
    v = squared_norm(c) + squared_norm(d) - e0;
  }
  const double mc = mean_of(de);
  const double loss = expected_pair_energy_change(alpha, kernel.mean_cosine(), u2);
  const double mc_rel = std::abs(mc - loss) / std::abs(loss);

  // Ordered pairs at rate 1/N each: sum_{i != j} |v_i - v_j|^2 = 2 N sum |v_i|^2 - 2 |P|^2,
  // so dT/dt = -(1 - alpha^2)(1 - b_1) T / 2 + 2 nu when P is negligible.
  const double g = (1 - alpha * alpha) * (1 - kernel.mean_cosine()) / 2;
  const double derived = 2 * nu / g;
  const auto oracle = steady_temperature_oracle({alpha, nu, 3}, kernel, PairConvention::Ordered);
  const double oracle_rel = std::abs(oracle.value - derived) / derived;

  const std::string cfg = "model = inelastic_thermostat\ndimension = 3\nn = 10000\n"
                          "alpha = 0.8\nnu = 1\nkernel = isotropic\nreplicas = 4\nt_end = 40\n"
                          "snapshot_times = " + times_list(30, 40, 1) + "\nseed = " +
                          std::to_string(kSeed) + "\n";
  Outcome o;
  o.csv = run_cli("simulate", cfg, workers);
  const auto t = Table::parse(o.csv);
  std::vector<double> temps;
  for (std::size_t r = 0; r < t.rows.size(); ++r) temps.push_back(t.real(r, "second_moment") / 3);
  const double measured = mean_of(temps);
  const double sim_rel = std::abs(measured - oracle.value) / oracle.value;
  o.pass = mc_rel <= 0.01 && oracle_rel <= 1e-12 && sim_rel <= 0.05 && temps.size() == 44;
  o.detail = fmt2("oracle %.4f, simulated %.4f", oracle.value, measured) +
             fmt(" (%.2f%%)", 100 * sim_rel) + fmt("; single-collision check %.3f%%", 100 * mc_rel);
  return o;
}

// Exact sup over xi of |F_a - F_b| / <xi>^s for two Gaussians, by dense scan.
double gaussian_toscani_scan(double ma, double va, double mb, double vb, double s, double L) {
  double best = 0.0;
  const int steps = 400000;
  for (int k = 0; k <= steps; ++k) {
    const double xi = -L + 2 * L * k / steps;
    const auto fa = std::polar(std::exp(-va * xi * xi / 2), -ma * xi);
    const auto fb = std::polar(std::exp(-vb * xi * xi / 2), -mb * xi);
    best = std::max(best, std::abs(fa - fb) / std::pow(1 + xi * xi, s / 2));
  }
  return best;
}

// 7. Fourier contraction of the spectral solver.
Outcome spectral_contraction(std::size_t) {
  const XiGrid grid(40.0, 512);
  const auto params = BobylevParams::from_kernel(AngularKernel::two_point(0.5, 0.5), 0.8, true, 1.0);
  const double s = 3.0, T = 1.0;
  const double dt = std::min(1e-3, spectral_stability_bound(grid, params));
  RngStream rng(kSeed, stream_id(stream_tag::initial, 7, 0));
  CsvWriter csv;
  csv.columns({"pair", "mean_a", "var_a", "mean_b", "var_b", "initial_distance", "max_ratio",
               "argmax_time"});
  double worst = 0.0, worst_initial = 0.0;
  bool consistent = true;
  for (std::size_t k = 0; k < 10; ++k) {
    const double ma = 2 * rng.uniform() - 1, mb = 2 * rng.uniform() - 1;
    const double va = 0.5 + 1.5 * rng.uniform(), vb = 0.5 + 1.5 * rng.uniform();
    const auto r = fourier_contraction_check(gaussian_spectrum(grid, ma, va),
                                             gaussian_spectrum(grid, mb, vb), params, s, T, dt);
    double ratio = 0.0, at = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      const double q = r.distances[i] / (std::exp(2 * r.times[i]) * r.distances[0]);
      if (q > ratio) {
        ratio = q;
        at = r.times[i];
      }
    }
    const double initial = gaussian_toscani_scan(ma, va, mb, vb, s, grid.half_width());
    const double initial_gap = std::abs(r.distances[0] - initial) / initial;
    worst_initial = std::max(worst_initial, initial_gap);
    consistent = consistent && r.times.front() == 0.0 && std::abs(r.times.back() - T) < 1e-12 &&
                 std::abs(ratio - r.max_ratio) <= 1e-12 * ratio;
    worst = std::max(worst, ratio);
    for (const auto *inv : {&r.invariants_a, &r.invariants_b}) {
      g_spectral.max_mass_error = std::max(g_spectral.max_mass_error, inv->max_mass_error);
      g_spectral.max_hermitian_error =
          std::max(g_spectral.max_hermitian_error, inv->max_hermitian_error);
      g_spectral.max_modulus = std::max(g_spectral.max_modulus, inv->max_modulus);
      g_spectral.checks += inv->checks;
    }
    csv.row({std::uint64_t{k}, ma, va, mb, vb, r.distances[0], ratio, at});
  }
  Outcome o;
  o.pass = consistent && worst <= 1.01 && worst_initial <= 0.02;
  o.detail = fmt("max ratio %.5f", worst) + fmt(", grid vs exact initial distance %.2e", worst_initial);
  o.csv = csv.str();
  return o;
}

// 8. McKean-Vlasov moment trajectories.
Outcome mkv_moments(std::size_t workers) {
  const double lambda = 1.0, kappa = 1.0, noise = 1.0, m0 = 1.0, v0 = 0.5;
  const std::string cfg = "model = mckean_vlasov\ndimension = 1\ndrift_coefficient = -1\n"
                          "noise = 1\ninteraction = linear\ninteraction_strength = 1\n"
                          "initial = gaussian\ninitial_mean = 1\ninitial_variance = 0.5\n"
                          "n = 10000\ndt = 0.0005\nt_end = 2\nsnapshot_times = " +
                          times_list(0, 2, 0.25) + "\nreplicas = 32\nseed = " +
                          std::to_string(kSeed) + "\n";
  Outcome o;
  o.csv = run_cli("simulate", cfg, workers);
  const auto t = Table::parse(o.csv);
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_time;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double m = t.real(r, "mean_0");
    auto &slot = by_time[t.real(r, "time")];
    slot.first.push_back(m);
    slot.second.push_back(t.real(r, "second_moment") - m * m);
  }
  // m' = -lambda m and v' = -2 (lambda + kappa) v + noise^2 for the limit law.
  const double v_inf = noise * noise / (2 * (lambda + kappa));
  double worst = 0.0;
  for (const auto &[time, mv] : by_time) {
    const double m_exact = m0 * std::exp(-lambda * time);
    const double v_exact = v_inf + (v0 - v_inf) * std::exp(-2 * (lambda + kappa) * time);
    worst = std::max(worst, std::abs(mean_of(mv.first) - m_exact) / std_error_of(mv.first));
    worst = std::max(worst, std::abs(mean_of(mv.second) - v_exact) / std_error_of(mv.second));
  }
  o.pass = by_time.size() == 9 && worst <= 3.0;
  o.detail = fmt("largest deviation %.2f standard errors over 9 snapshots", worst);
  return o;
}

// 9. Vlasov improved rate with quantile initialization.
Outcome vlasov_rate(std::size_t workers) {
  const std::string cfg = "model = vlasov\ndimension = 1\ninitial = quantile\n"
                          "interaction = gaussian_derivative\ninteraction_strength = 1\n"
                          "interaction_width = 1\ndt = 0.025\nt_end = 1\n"
                          "n_values = 128, 256, 512, 1024, 2048, 4096, 8192\n"
                          "observables = compressed_sq:1, bump:1\nestimator = disjoint_blocks\n"
                          "oracle = vlasov_quadrature\nquadrature_nodes = 160\nseed = " +
                          std::to_string(kSeed) + "\n";
  Outcome o;
  o.csv = run_cli("chaos-curve", cfg, workers);
  const auto t = Table::parse(o.csv);
  std::map<std::string, std::map<std::size_t, double>> curves;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    curves[t.text(r, "observable")][static_cast<std::size_t>(t.real(r, "N"))] = t.real(r, "error");
  }
  o.pass = curves.size() == 2;
  for (const auto &[name, c] : curves) {
    double worst = 0.0;
    for (std::size_t n = 128; n < 8192; n *= 2) worst = std::max(worst, c.at(2 * n) / c.at(n));
    o.pass = o.pass && c.size() == 7 && worst <= 0.7;
    o.detail += (o.detail.empty() ? "" : "; ") + name + fmt(": largest error(2N)/error(N) %.3f", worst);
  }
  return o;
}

// 10. Exact matching against permutations, and spectral invariants.
Outcome exactness(std::size_t) {
  RngStream rng(kSeed, stream_id(stream_tag::initial, 10, 0));
  CsvWriter csv;
  csv.columns({"instance", "N", "matching_cost", "permutation_minimum"});
  std::size_t violations = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng.uniform_index(7);
    std::vector<double> a(2 * n), b(2 * n);
    for (double &x : a) x = rng.normal();
    for (double &x : b) x = 1.5 * rng.normal() + 0.5;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    do {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
          const double diff = a[2 * i + d] - b[2 * p[i] + d];
          c += diff * diff;
        }
      }
      best = std::min(best, c / static_cast<double>(n));
    } while (std::next_permutation(p.begin(), p.end()));
    const double cost = w2_exact_matching(EmpiricalMeasure(2, a), EmpiricalMeasure(2, b)).cost;
    if (std::abs(cost - best) > 1e-12 * std::max(1.0, best)) ++violations;
    csv.row({std::uint64_t{k}, std::uint64_t{n}, cost, best});
  }
  const bool invariants = g_spectral.checks > 0 && g_spectral.max_mass_error <= 1e-12 &&
                          g_spectral.max_hermitian_error <= 1e-12 &&
                          g_spectral.max_modulus <= 1.0 + 1e-12;
  csv.footer("spectral.checks", static_cast<double>(g_spectral.checks));
  csv.footer("spectral.max_mass_error", g_spectral.max_mass_error);
  csv.footer("spectral.max_hermitian_error", g_spectral.max_hermitian_error);
  csv.footer("spectral.max_modulus", g_spectral.max_modulus);
  Outcome o;
  o.pass = violations == 0 && invariants;
  o.detail = std::to_string(violations) + " matching violations in 1000 instances; " +
             std::to_string(g_spectral.checks) + " spectral checks" +
             fmt2(", |F(0)-1| <= %.1e, |F| <= 1 + %.1e", g_spectral.max_mass_error,
                  g_spectral.max_modulus - 1.0) +
             fmt(", Hermitian error <= %.1e", g_spectral.max_hermitian_error);
  o.csv = csv.str();
  return o;
}

struct Criterion {
  int id;
  const char *name;
  double limit_seconds;
  std::function<Outcome(std::size_t)> run;
};

Outcome timed(const Criterion &c, std::size_t workers) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run(workers);
  } catch (const std::exception &e) {
    o.pass = false;
    o.detail = std::string("error: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

} // namespace

int main(int argc, char **argv) {
  std::size_t workers = 2;
  std::string out_dir;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--workers" && k + 1 < argc) {
      workers = std::stoul(argv[++k]);
    } else if (arg == "--out-dir" && k + 1 < argc) {
      out_dir = argv[++k];
    } else {
      std::fprintf(stderr, "usage: acceptance [--workers K] [--out-dir DIR]\n");
      return 2;
    }
  }
  if (workers < 2) {
    std::fprintf(stderr, "acceptance: --workers must be at least 2\n");
    return 2;
  }

  // Criterion 10 reads the spectral invariants gathered by criterion 7.
  const std::vector<Criterion> criteria{
      {1, "conservation", 60, conservation},
      {2, "symmetrization bound", 60, symmetrization_bound},
      {3, "Omega_N rate ceiling", 600, omega_rate},
      {4, "elastic chaos decay", 1200, chaos_decay},
      {5, "Tanaka contraction", 600, tanaka},
      {6, "thermostat energy balance", 600, thermostat},
      {7, "Fourier contraction", 60, spectral_contraction},
      {8, "McKean-Vlasov moments", 300, mkv_moments},
      {9, "Vlasov improved rate", 600, vlasov_rate},
      {10, "exactness substitutes", 600, exactness},
  };

  bool all = true;
  std::vector<std::string> serial_csv;
  for (const auto &c : criteria) {
    const Outcome o = timed(c, 1);
    const bool pass = o.pass && o.seconds <= c.limit_seconds;
    all = all && pass;
    serial_csv.push_back(o.csv);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      CsvWriter::write_file(out_dir + "/criterion_" + std::to_string(c.id) + ".csv", o.csv);
    }
    std::printf("criterion %d (%s): %s | %s | %.1f s (limit %.0f s)\n", c.id, c.name,
                pass ? "PASS" : "FAIL", o.detail.c_str(), o.seconds, c.limit_seconds);
    std::fflush(stdout);
  }

  g_spectral = SpectralInvariants{};
  std::vector<std::string> differing;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const Outcome o = timed(criteria[k], workers);
    if (o.csv.empty() || o.csv != serial_csv[k]) differing.push_back(std::to_string(criteria[k].id));
  }
  const bool same = differing.empty();
  all = all && same;
  std::string list;
  for (const auto &d : differing) list += (list.empty() ? "" : ", ") + d;
  std::printf("criterion 11 (reproducibility): %s | workers 1 vs %zu: %s\n", same ? "PASS" : "FAIL",
              workers, same ? "all CSV outputs byte-identical" : ("differs for " + list).c_str());
  return all ? 0 : 1;
}
