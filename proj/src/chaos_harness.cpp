#include "mfchaos/chaos_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mfchaos/parallel.hpp"

namespace mfchaos {

namespace {

// values[j][i] = phi_j(z_i).
std::vector<std::vector<double>> factor_table(const ParticleState &z,
                                              const ObservableProduct &obs) {
  std::vector<std::vector<double>> table(obs.ell(), std::vector<double>(z.size()));
  for (std::size_t j = 0; j < obs.ell(); ++j) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      table[j][i] = obs.factors()[j](z.particle(i));
    }
  }
  return table;
}

double injective_tuple_sum(const std::vector<std::vector<double>> &table, std::size_t depth,
                           std::vector<char> &used, double partial) {
  if (depth == table.size()) {
    return partial;
  }
  const std::size_t n = table[depth].size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = 1;
    sum += injective_tuple_sum(table, depth + 1, used, partial * table[depth][i]);
    used[i] = 0;
  }
  return sum;
}

double falling_factorial(std::size_t n, std::size_t k) {
  double f = 1.0;
  for (std::size_t i = 0; i < k; ++i) f *= static_cast<double>(n - i);
  return f;
}

double sample_sd(const std::vector<double> &v) {
  if (v.size() < 2) return 0.0;
  const double mean = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = (v[k] - mean) * (v[k] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

} // namespace

SymmetrizationGap symmetrization_gap(const ParticleState &z, const ObservableProduct &obs,
                                     RngStream *rng, std::size_t samples,
                                     std::size_t exhaustive_limit) {
  const std::size_t n = z.size();
  const std::size_t ell = obs.ell();
  if (n < 2 * ell) {
    throw std::invalid_argument("symmetrization_gap: requires N >= 2 ell");
  }
  obs.check_dim(z.dim());
  const auto table = factor_table(z, obs);
  SymmetrizationGap out;
  out.polynomial = 1.0;
  for (const auto &row : table) {
    out.polynomial *= pairwise_sum(row) / static_cast<double>(n);
  }
  const double tuples = falling_factorial(n, ell);
  if (tuples <= static_cast<double>(exhaustive_limit)) {
    std::vector<char> used(n, 0);
    out.symmetrized = injective_tuple_sum(table, 0, used, 1.0) / tuples;
  } else {
    if (rng == nullptr || samples < 2) {
      throw std::invalid_argument(
          "symmetrization_gap: sampled symmetrization needs an rng and >= 2 samples");
    }
    out.exhaustive = false;
    std::vector<double> draws(samples);
    std::vector<std::size_t> idx(ell);
    for (std::size_t s = 0; s < samples; ++s) {
      double p = 1.0;
      for (std::size_t j = 0; j < ell; ++j) {
        bool repeat;
        do {
          idx[j] = rng->uniform_index(n);
          repeat = std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(j), idx[j]) !=
                   idx.begin() + static_cast<std::ptrdiff_t>(j);
        } while (repeat);
        p *= table[j][idx[j]];
      }
      draws[s] = p;
    }
    out.symmetrized = pairwise_sum(draws) / static_cast<double>(samples);
    out.mc_error = sample_sd(draws) / std::sqrt(static_cast<double>(samples));
  }
  out.gap = std::abs(out.polynomial - out.symmetrized);
  out.bound = 2.0 * static_cast<double>(ell * ell) * obs.sup_norm() / static_cast<double>(n);
  return out;
}

double symmetrized_by_permutations(const ParticleState &z, const ObservableProduct &obs) {
  const std::size_t n = z.size();
  if (n > 10) {
    throw std::invalid_argument("symmetrized_by_permutations: N <= 10 only");
  }
  if (obs.ell() > n) {
    throw std::invalid_argument("symmetrized_by_permutations: ell exceeds N");
  }
  const auto table = factor_table(z, obs);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double sum = 0.0;
  std::size_t count = 0;
  do {
    double p = 1.0;
    for (std::size_t j = 0; j < obs.ell(); ++j) p *= table[j][perm[j]];
    sum += p;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

const char *to_string(TupleEstimator e) {
  return e == TupleEstimator::FirstParticles ? "first_particles" : "disjoint_blocks";
}

TupleEstimator tuple_estimator_from_name(const std::string &name) {
  if (name == "first_particles") return TupleEstimator::FirstParticles;
  if (name == "disjoint_blocks") return TupleEstimator::DisjointBlocks;
  throw std::invalid_argument("unknown tuple estimator '" + name + "'");
}

double tuple_statistic(const ParticleState &state, const ObservableProduct &obs,
                       TupleEstimator estimator) {
  const std::size_t ell = obs.ell();
  if (state.size() < ell) {
    throw std::invalid_argument("tuple_statistic: fewer particles than factors");
  }
  const std::size_t blocks = estimator == TupleEstimator::FirstParticles ? 1 : state.size() / ell;
  std::vector<double> values(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double p = 1.0;
    for (std::size_t j = 0; j < ell; ++j) p *= obs.factors()[j](state.particle(b * ell + j));
    values[b] = p;
  }
  return pairwise_sum(values) / static_cast<double>(blocks);
}

const char *to_string(OracleSpec::Kind k) {
  switch (k) {
  case OracleSpec::Kind::LargeN: return "large_n";
  case OracleSpec::Kind::GaussianMoments: return "gaussian_moments";
  case OracleSpec::Kind::VlasovQuadrature: return "vlasov_quadrature";
  }
  return "?";
}

OracleSpec::Kind oracle_kind_from_name(const std::string &name) {
  for (auto k : {OracleSpec::Kind::LargeN, OracleSpec::Kind::GaussianMoments,
                 OracleSpec::Kind::VlasovQuadrature}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown oracle '" + name + "'");
}

FactorMoments build_oracle(const ModelConfig &model, const InitialLaw &init,
                           const ObservableProduct &obs, std::span<const double> times,
                           const OracleSpec &spec, std::uint64_t master_seed,
                           std::size_t workers) {
  const double t_end = times.empty() ? 0.0 : times.back();
  switch (spec.kind) {
  case OracleSpec::Kind::LargeN:
    return large_n_oracle(model, init, obs, t_end, times,
                          {spec.n_ref, spec.replicas, master_seed, workers});
  case OracleSpec::Kind::GaussianMoments:
    if (model.kind != ModelKind::McKeanVlasov) {
      throw std::invalid_argument("gaussian_moments oracle needs the mckean_vlasov model");
    }
    return gaussian_moment_oracle(model.drift_diffusion, init, obs, times);
  case OracleSpec::Kind::VlasovQuadrature:
    if (model.kind != ModelKind::Vlasov) {
      throw std::invalid_argument("vlasov_quadrature oracle needs the vlasov model");
    }
    return vlasov_quadrature_moments(model.vlasov, init, obs, spec.quadrature_nodes, t_end,
                                     model.dt, times);
  }
  throw std::logic_error("build_oracle: unknown oracle");
}

ChaosCurve chaos_error_curve(const ModelConfig &model, const InitialLaw &init,
                             const ObservableProduct &obs, const ChaosOptions &opt) {
  model.validate();
  obs.check_dim(model.state_dim());
  if (init.dim() != model.state_dim()) {
    throw std::invalid_argument("chaos_error_curve: initial law dimension does not match model");
  }
  const auto &ns = opt.n_values;
  if (ns.empty() || !std::is_sorted(ns.begin(), ns.end()) ||
      std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
    throw std::invalid_argument("chaos_error_curve: n_values must be strictly increasing");
  }
  if (ns.front() < obs.ell()) {
    throw std::invalid_argument("chaos_error_curve: N smaller than the number of factors");
  }
  const auto &times = opt.time_grid;
  if (times.empty() || times.front() < 0.0 || !std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("chaos_error_curve: time grid must be sorted and nonnegative");
  }
  if (opt.oracle.kind == OracleSpec::Kind::LargeN && opt.oracle.n_ref < 16 * ns.back()) {
    throw std::invalid_argument("chaos_error_curve: N_ref must be at least 16 x max N");
  }
  // Fixed initial data is not exchangeable; only the empirical average of a
  // one-particle observable estimates the symmetrized marginal.
  if (init.deterministic() &&
      (obs.ell() != 1 || opt.estimator != TupleEstimator::DisjointBlocks)) {
    throw std::invalid_argument(
        "chaos_error_curve: deterministic initial data needs ell = 1 and disjoint_blocks");
  }
  const double t_end = times.back();

  ChaosCurve curve;
  curve.model = to_string(model.kind);
  curve.observable = obs.name();
  curve.estimator = to_string(opt.estimator);
  curve.n_values = ns;

  const FactorMoments oracle =
      build_oracle(model, init, obs, times, opt.oracle, opt.master_seed, opt.workers);
  curve.oracle = oracle.kind;

  const bool deterministic = !model.stochastic_dynamics() && init.deterministic();
  const std::size_t groups = ns.size();
  curve.replicas.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t reps = opt.replicas;
    if (opt.sample_budget > 0) {
      const std::size_t per =
          opt.estimator == TupleEstimator::FirstParticles ? 1 : ns[g] / obs.ell();
      reps = std::max(opt.min_replicas, (opt.sample_budget + per - 1) / per);
    }
    curve.replicas[g] = deterministic ? 1 : std::max<std::size_t>(reps, 1);
  }

  // stats[g][r][t]
  std::vector<std::vector<std::vector<double>>> stats(groups);
  std::vector<std::size_t> offsets(groups + 1, 0);
  for (std::size_t g = 0; g < groups; ++g) {
    stats[g].resize(curve.replicas[g]);
    offsets[g + 1] = offsets[g] + curve.replicas[g];
  }
  std::vector<std::uint64_t> draws(offsets.back(), 0);
  parallel_for(offsets.back(), opt.workers, [&](std::size_t task) {
    const std::size_t g = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), task) - offsets.begin() - 1);
    const std::size_t r = task - offsets[g];
    RngStream init_rng(opt.master_seed,
                       stream_id(stream_tag::initial, static_cast<std::uint32_t>(g),
                                 static_cast<std::uint32_t>(r)));
    RngStream dyn_rng(opt.master_seed,
                      stream_id(stream_tag::dynamics, static_cast<std::uint32_t>(g),
                                static_cast<std::uint32_t>(r)));
    const auto snaps = run_model(model, init.sample(ns[g], init_rng), t_end, times, dyn_rng);
    std::vector<double> row(times.size());
    for (std::size_t t = 0; t < times.size(); ++t) {
      row[t] = tuple_statistic(snaps[t], obs, opt.estimator);
    }
    stats[g][r] = std::move(row);
    draws[task] = init_rng.draw_counter() + dyn_rng.draw_counter();
  });
  curve.stream_count = 2 * offsets.back() + oracle.stream_count;
  curve.draw_count =
      std::accumulate(draws.begin(), draws.end(), std::uint64_t{0}) + oracle.draw_count;

  const std::size_t ell = obs.ell();
  auto oracle_products = [&](const std::vector<std::size_t> *pick) {
    std::vector<double> p(times.size(), 1.0);
    if (pick == nullptr || oracle.replica_values.empty()) {
      for (std::size_t t = 0; t < times.size(); ++t) p[t] = oracle.product(t);
      return p;
    }
    std::vector<double> col(pick->size());
    for (std::size_t t = 0; t < times.size(); ++t) {
      for (std::size_t j = 0; j < ell; ++j) {
        for (std::size_t k = 0; k < pick->size(); ++k) {
          col[k] = oracle.replica_values[(*pick)[k]][t][j];
        }
        p[t] *= pairwise_sum(col) / static_cast<double>(col.size());
      }
    }
    return p;
  };
  auto group_error = [&](std::size_t g, const std::vector<std::size_t> *pick,
                         const std::vector<double> &products, double *argmax) {
    const auto &rows = stats[g];
    const std::size_t count = pick ? pick->size() : rows.size();
    std::vector<double> col(count);
    double worst = -1.0;
    for (std::size_t t = 0; t < times.size(); ++t) {
      for (std::size_t k = 0; k < count; ++k) col[k] = rows[pick ? (*pick)[k] : k][t];
      const double gap = std::abs(pairwise_sum(col) / static_cast<double>(count) - products[t]);
      if (gap > worst) {
        worst = gap;
        if (argmax) *argmax = times[t];
      }
    }
    return worst;
  };

  const auto base_products = oracle_products(nullptr);
  curve.errors.resize(groups);
  curve.argmax_time.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    curve.errors[g] = group_error(g, nullptr, base_products, &curve.argmax_time[g]);
  }

  // Bootstrap: resample replicas of every group and of the oracle.
  RngStream boot(opt.master_seed, stream_id(stream_tag::bootstrap, 0, 0));
  const std::size_t B = opt.bootstrap_samples;
  curve.bootstrap_errors.assign(B, std::vector<double>(groups));
  std::vector<std::vector<double>> oracle_boot(times.size(), std::vector<double>(B));
  std::vector<std::size_t> pick;
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<double> products = base_products;
    if (!oracle.replica_values.empty()) {
      pick.resize(oracle.replica_values.size());
      for (auto &k : pick) k = boot.uniform_index(pick.size());
      products = oracle_products(&pick);
    }
    for (std::size_t t = 0; t < times.size(); ++t) oracle_boot[t][b] = products[t];
    for (std::size_t g = 0; g < groups; ++g) {
      pick.resize(stats[g].size());
      for (auto &k : pick) k = boot.uniform_index(pick.size());
      curve.bootstrap_errors[b][g] = group_error(g, &pick, products, nullptr);
    }
  }
  curve.draw_count += boot.draw_counter();
  curve.stream_count += 1;
  curve.std_errors.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<double> col(B);
    for (std::size_t b = 0; b < B; ++b) col[b] = curve.bootstrap_errors[b][g];
    curve.std_errors[g] = sample_sd(col);
  }
  for (std::size_t t = 0; t < times.size(); ++t) {
    curve.oracle_std_error = std::max(curve.oracle_std_error, sample_sd(oracle_boot[t]));
  }
  const double smallest = *std::min_element(curve.errors.begin(), curve.errors.end());
  curve.resolution_warning = 3.0 * curve.oracle_std_error >= smallest;
  return curve;
}

std::pair<double, double> least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw std::invalid_argument("least_squares: need >= 2 matching points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("least_squares: x values are all equal");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

RateFit rate_fit(const ChaosCurve &curve, std::uint64_t seed, std::size_t parametric_samples) {
  RateFit fit;
  const auto &ns = curve.n_values;
  const std::size_t k = ns.size();
  if (k < 4) {
    fit.reason = "need at least 4 N values";
    return fit;
  }
  if (std::log10(static_cast<double>(ns.back()) / static_cast<double>(ns.front())) < 1.5 - 1e-12) {
    fit.reason = "N values span less than 1.5 decades";
    return fit;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
    if (!(curve.errors[i] > 2.0 * se) || !(curve.errors[i] > 0.0)) {
      std::ostringstream msg;
      msg << "error at N=" << ns[i] << " is within 2 standard errors of 0";
      fit.reason = msg.str();
      return fit;
    }
  }
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(static_cast<double>(ns[i]));
    y[i] = std::log(curve.errors[i]);
  }
  std::tie(fit.slope, fit.intercept) = least_squares(x, y);

  std::vector<double> slopes;
  auto try_fit = [&](const std::vector<double> &errs) {
    std::vector<double> yy(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (!(errs[i] > 0.0)) return;
      yy[i] = std::log(errs[i]);
    }
    slopes.push_back(least_squares(x, yy).first);
  };
  if (!curve.bootstrap_errors.empty()) {
    for (const auto &rep : curve.bootstrap_errors) try_fit(rep);
  } else {
    RngStream rng(seed, stream_id(stream_tag::bootstrap, 1, 0));
    std::vector<double> errs(k);
    for (std::size_t s = 0; s < parametric_samples; ++s) {
      for (std::size_t i = 0; i < k; ++i) {
        const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
        errs[i] = curve.errors[i] + se * rng.normal();
      }
      try_fit(errs);
    }
  }
  if (slopes.empty()) {
    fit.ci_low = fit.ci_high = fit.slope;
  } else {
    std::sort(slopes.begin(), slopes.end());
    auto q = [&](double p) {
      const double pos = p * static_cast<double>(slopes.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, slopes.size() - 1);
      return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    fit.ci_low = q(0.025);
    fit.ci_high = q(0.975);
  }
  fit.ok = true;
  return fit;
}

TanakaCheck tanaka_contraction_check(const ModelConfig &model, const InitialLaw &a,
                                     const InitialLaw &b, std::span<const double> times,
                                     std::size_t n, std::size_t replicas,
                                     std::uint64_t master_seed, std::size_t workers) {
  if (model.kind != ModelKind::KacElastic) {
    throw std::invalid_argument(
        "tanaka_contraction_check: the contraction holds for the elastic model only");
  }
  model.validate();
  if (a.dim() != model.dim || b.dim() != model.dim) {
    throw std::invalid_argument("tanaka_contraction_check: law dimension mismatch");
  }
  if (times.empty() || replicas == 0) {
    throw std::invalid_argument("tanaka_contraction_check: need times and replicas");
  }
  const double t_end = times.back();
  std::vector<std::vector<double>> costs(replicas);
  std::vector<std::uint64_t> draws(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto id = static_cast<std::uint32_t>(r);
    RngStream init_a(master_seed, stream_id(stream_tag::initial, 0, id));
    RngStream init_b = init_a;
    RngStream dyn_a(master_seed, stream_id(stream_tag::dynamics, 0, id));
    RngStream dyn_b = dyn_a;
    const auto sa = run_model(model, a.sample(n, init_a), t_end, times, dyn_a);
    const auto sb = run_model(model, b.sample(n, init_b), t_end, times, dyn_b);
    std::vector<double> row(times.size());
    std::vector<double> per(n);
    for (std::size_t t = 0; t < times.size(); ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto va = sa[t].particle(i), vb = sb[t].particle(i);
        double s = 0.0;
        for (std::size_t c = 0; c < va.size(); ++c) s += (va[c] - vb[c]) * (va[c] - vb[c]);
        per[i] = s;
      }
      row[t] = pairwise_sum(per) / static_cast<double>(n);
    }
    costs[r] = std::move(row);
    draws[r] = init_a.draw_counter() + init_b.draw_counter() + dyn_a.draw_counter() +
               dyn_b.draw_counter();
  });
  TanakaCheck out;
  out.stream_count = 2 * replicas;
  for (auto d : draws) out.draw_count += d;
  std::vector<double> col(replicas);
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (std::size_t r = 0; r < replicas; ++r) col[r] = costs[r][t];
    const double mean = pairwise_sum(col) / static_cast<double>(replicas);
    const double se_sq = sample_sd(col) / std::sqrt(static_cast<double>(replicas));
    const double w2 = std::sqrt(std::max(mean, 0.0));
    out.points.push_back({times[t], w2, w2 > 0.0 ? se_sq / (2.0 * w2) : 0.0});
  }
  const auto &p0 = out.points.front();
  for (std::size_t t = 1; t < out.points.size(); ++t) {
    const auto &p = out.points[t];
    const double pooled = std::sqrt(p.std_error * p.std_error + p0.std_error * p0.std_error);
    const double excess = p.w2 - p0.w2;
    if (pooled > 0.0) {
      out.worst_excess_in_se = std::max(out.worst_excess_in_se, excess / pooled);
      if (excess > 2.0 * pooled) out.passed = false;
    } else if (excess > 1e-12 * std::max(1.0, p0.w2)) {
      out.passed = false;
    }
  }
  return out;
}

FourierContraction fourier_contraction_check(const GridSpectrum &a, const GridSpectrum &b,
                                             const BobylevParams &params, double s, double T,
                                             double dt) {
  if (!(s >= 0.0)) {
    throw std::invalid_argument("fourier_contraction_check: s must be nonnegative");
  }
  auto distance = [s](const GridSpectrum &x, const GridSpectrum &y) {
    if (s == 0.0) {
      double m = 0.0;
      for (std::size_t k = 0; k < x.values.size(); ++k) {
        m = std::max(m, std::abs(x.values[k] - y.values[k]));
      }
      return m;
    }
    return toscani_norm(x, y, s).value;
  };
  FourierContraction out;
  const double d0 = distance(a, b);
  out.times.push_back(0.0);
  out.distances.push_back(d0);
  std::vector<GridSpectrum> path_a;
  spectral_evolve(a, params, T, dt, &out.invariants_a,
                  [&](double, const GridSpectrum &f) { path_a.push_back(f); });
  std::size_t k = 0;
  spectral_evolve(b, params, T, dt, &out.invariants_b, [&](double t, const GridSpectrum &g) {
    out.times.push_back(t);
    out.distances.push_back(distance(path_a[k++], g));
  });
  if (d0 == 0.0) {
    out.identical_inputs = true;
    return out;
  }
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    const double ratio = out.distances[i] / (std::exp(2.0 * out.times[i]) * d0);
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_time = out.times[i];
    }
  }
  return out;
}

} // namespace mfchaos
