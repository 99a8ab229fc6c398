#include "mfchaos/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfchaos/cli/check_suite.hpp"
#include "mfchaos/metrics.hpp"
#include "mfchaos/observables.hpp"
#include "mfchaos/parallel.hpp"

namespace mfchaos::cli {

namespace {

std::vector<std::string> kernel_names() {
  return {"isotropic", "forward_peaked", "backward_peaked", "grazing_spike"};
}

std::vector<std::string> interaction_names() {
  return {"zero", "linear", "gaussian_derivative", "screened_coulomb_mollified"};
}

std::vector<double> default_times(double t_end, std::size_t points) {
  std::vector<double> t(points);
  for (std::size_t k = 0; k < points; ++k) {
    t[k] = t_end * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return t;
}

/// Uniform grid of t_end/dt steps: snap default times onto it.
std::vector<double> snap_to_lattice(std::vector<double> times, double dt) {
  for (auto &t : times) t = std::round(t / dt) * dt;
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

InitialLaw resolve_law(Config &c, const std::string &prefix, std::size_t state_dim,
                       bool vlasov) {
  const std::string kind =
      c.get_choice(prefix, vlasov ? "quantile" : "gaussian",
                   {"gaussian", "uniform", "quantile", "file"});
  if (kind == "file") {
    return InitialLaw::from_state(read_state_file(c.get_string(prefix + "_file", "")));
  }
  std::vector<double> var_default(state_dim, 1.0);
  if (vlasov) {
    for (std::size_t k = state_dim / 2; k < state_dim; ++k) var_default[k] = 0.0;
  }
  const auto mean = c.get_reals(prefix + "_mean", std::vector<double>(state_dim, 0.0));
  const auto var = c.get_reals(prefix + "_variance", var_default);
  if (mean.size() != state_dim || var.size() != state_dim) {
    throw ConfigError("key '" + prefix + "_mean'/'" + prefix + "_variance': expected " +
                      std::to_string(state_dim) + " entries");
  }
  try {
    switch (initial_kind_from_name(kind)) {
    case InitialLaw::Kind::Uniform: return InitialLaw::uniform(mean, var);
    case InitialLaw::Kind::Quantile: return InitialLaw::quantile(mean, var);
    default: return InitialLaw::gaussian(mean, var);
    }
  } catch (const std::invalid_argument &e) {
    throw ConfigError("key '" + prefix + "': " + e.what());
  }
}

void rate_convention_meta(CsvWriter &csv, const ModelConfig &m) {
  if (m.kind == ModelKind::KacElastic || m.kind == ModelKind::InelasticThermostat) {
    csv.meta("model.pair_convention", to_string(m.convention));
    csv.meta("model.total_collision_rate",
             m.convention == PairConvention::Ordered ? "N-1" : "(N-1)/2");
    csv.meta("model.kernel_mean_cosine", m.kernel.mean_cosine());
  }
  if (m.kind == ModelKind::McKeanVlasov) {
    csv.meta("model.interaction_normalization",
             m.drift_diffusion.mean_field_prefactor ? "1/(N-1)" : "1/N");
    csv.meta("model.integrator", "euler_maruyama");
  }
  if (m.kind == ModelKind::Vlasov) {
    csv.meta("model.interaction_normalization", "1/N");
    csv.meta("model.integrator", "explicit_midpoint");
  }
}

void rng_meta(CsvWriter &csv, std::uint64_t streams, std::uint64_t draws) {
  csv.meta("rng.generator", "philox4x32-10");
  csv.meta("rng.streams", streams);
  csv.meta("rng.draws", draws);
}

struct Summary {
  std::vector<double> mean;
  double second_moment;
};

Summary summarize(const ParticleState &s) {
  const std::size_t m = s.dim(), n = s.size();
  Summary out{std::vector<double>(m), 0.0};
  std::vector<double> col(n), sq(n);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < n; ++i) col[i] = s.particle(i)[c];
    out.mean[c] = pairwise_sum(col) / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) sq[i] = squared_norm(s.particle(i));
  out.second_moment = pairwise_sum(sq) / static_cast<double>(n);
  return out;
}

std::uint64_t seed_of(Config &c, const RunOptions &opt) {
  if (opt.seed) c.set("seed", std::to_string(*opt.seed));
  return c.get_uint("seed", 1);
}

// simulate -----------------------------------------------------------------

RunResult cmd_simulate(Config &c, const RunOptions &opt) {
  const std::uint64_t seed = seed_of(c, opt);
  const ModelSetup setup = resolve_model(c);
  const std::size_t n = c.get_uint("n", 1000);
  const std::size_t replicas = c.get_uint("replicas", 1);
  const bool particles = c.get_bool("output_particles", false);
  std::vector<ObservableProduct> obs;
  for (const auto &name : c.get_strings("observables", {})) {
    obs.push_back(ObservableProduct::parse(name));
    obs.back().check_dim(setup.model.state_dim());
  }
  c.reject_unknown();
  if (n < 2 || replicas == 0) throw ConfigError("key 'n'/'replicas': need n >= 2, replicas >= 1");

  std::vector<std::vector<ParticleState>> runs(replicas);
  std::vector<std::uint64_t> draws(replicas);
  parallel_for(replicas, opt.workers, [&](std::size_t r) {
    const auto id = static_cast<std::uint32_t>(r);
    RngStream init_rng(seed, stream_id(stream_tag::initial, 0, id));
    RngStream dyn_rng(seed, stream_id(stream_tag::dynamics, 0, id));
    runs[r] = run_model(setup.model, setup.init.sample(n, init_rng), setup.t_end, setup.times,
                        dyn_rng);
    draws[r] = init_rng.draw_counter() + dyn_rng.draw_counter();
  });

  CsvWriter csv;
  const std::size_t m = setup.model.state_dim();
  std::vector<std::string> cols{"replica", "time"};
  if (particles) {
    cols.push_back("particle");
    for (std::size_t k = 0; k < m; ++k) cols.push_back("z" + std::to_string(k));
  } else {
    for (std::size_t k = 0; k < m; ++k) cols.push_back("mean_" + std::to_string(k));
    cols.push_back("second_moment");
    for (const auto &o : obs) cols.push_back(o.name());
  }
  csv.columns(cols);
  for (std::size_t r = 0; r < replicas; ++r) {
    for (const auto &s : runs[r]) {
      if (particles) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          std::vector<CsvWriter::Cell> row{std::uint64_t{r}, s.time(), std::uint64_t{i}};
          for (double x : s.particle(i)) row.emplace_back(x);
          csv.row(row);
        }
        continue;
      }
      const auto sum = summarize(s);
      std::vector<CsvWriter::Cell> row{std::uint64_t{r}, s.time()};
      for (double x : sum.mean) row.emplace_back(x);
      row.emplace_back(sum.second_moment);
      const auto mu = empirical_from_state(s);
      for (const auto &o : obs) row.emplace_back(poly_observable(mu, o));
      csv.row(row);
    }
  }
  write_header(csv, "simulate", c);
  rate_convention_meta(csv, setup.model);
  rng_meta(csv, 2 * replicas, std::accumulate(draws.begin(), draws.end(), std::uint64_t{0}));
  return {0, csv.str(), {}};
}

// metric -------------------------------------------------------------------

RunResult cmd_metric(Config &c, const RunOptions &opt) {
  const std::uint64_t seed = seed_of(c, opt);
  const ModelSetup setup = resolve_model(c);
  const std::size_t m = setup.model.state_dim();
  const std::size_t n = c.get_uint("n", 1000);
  const std::size_t replicas = c.get_uint("replicas", 1);
  const auto metrics = c.get_strings("metrics", {"w2_sliced"});
  const InitialLaw reference = resolve_law(c, "reference", m, false);
  const std::size_t ref_size = c.get_uint("reference_size", n);
  const std::size_t n_proj = c.get_uint("n_projections", 64);
  const double toscani_s = c.get_real("toscani_s", 3.0);
  const double sobolev_s = c.get_real("sobolev_s", 1.0);
  const double xi_half = c.get_real("xi_half_width", 40.0);
  const std::size_t xi_intervals = c.get_uint("xi_intervals", 4096);
  std::vector<double> edge_default;
  for (int k = -8; k <= 8; ++k) edge_default.push_back(0.5 * k);
  const auto edges = c.get_reals("tv_bin_edges", edge_default);
  c.reject_unknown();

  const std::vector<std::string> known{"w1", "w2_exact", "w2_sliced", "toscani",
                                       "h_neg_sobolev", "tv_histogram"};
  for (const auto &name : metrics) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("key 'metrics': unknown metric '" + name + "'");
    }
    const bool one_d = name == "w1" || name == "toscani" || name == "h_neg_sobolev" ||
                       name == "tv_histogram";
    if (one_d && m != 1) {
      throw ConfigError("key 'metrics': '" + name + "' needs a 1-D state");
    }
    if (name == "w2_exact" && ref_size != n) {
      throw ConfigError("key 'reference_size': w2_exact needs reference_size = n");
    }
  }
  if (reference.dim() != m) {
    throw ConfigError("key 'reference_mean': dimension does not match the model");
  }
  const XiGrid grid(xi_half, xi_intervals);

  struct Row {
    double time;
    std::string metric;
    double value, se;
    std::string note;
  };
  std::vector<std::vector<Row>> rows(replicas);
  std::vector<std::uint64_t> draws(replicas);
  parallel_for(replicas, opt.workers, [&](std::size_t r) {
    const auto id = static_cast<std::uint32_t>(r);
    RngStream init_rng(seed, stream_id(stream_tag::initial, 0, id));
    RngStream dyn_rng(seed, stream_id(stream_tag::dynamics, 0, id));
    RngStream ref_rng(seed, stream_id(stream_tag::reference, 0, id));
    const auto snaps = run_model(setup.model, setup.init.sample(n, init_rng), setup.t_end,
                                 setup.times, dyn_rng);
    const auto ref = empirical_from_state(reference.sample(ref_size, ref_rng));
    std::uint64_t extra = 0;
    for (std::size_t t = 0; t < snaps.size(); ++t) {
      const auto mu = empirical_from_state(snaps[t]);
      for (const auto &name : metrics) {
        Row row{snaps[t].time(), name, 0.0, 0.0, ""};
        if (name == "w1") {
          row.value = w1_exact_1d(mu, ref);
        } else if (name == "w2_exact") {
          row.value = std::sqrt(w2_exact_matching(mu, ref).cost);
        } else if (name == "w2_sliced") {
          RngStream dir(seed, stream_id(stream_tag::directions, static_cast<std::uint32_t>(t), id));
          const auto e = w2_sliced(mu, ref, n_proj, dir);
          row.value = e.value;
          row.se = e.std_error;
          extra += dir.draw_counter();
        } else if (name == "toscani") {
          const auto res = toscani_norm(mu, ref, toscani_s, grid);
          row.value = res.value;
          row.note = "argmax_xi=" + format_real(res.argmax_xi) +
                     (res.at_boundary ? ";boundary_argmax" : "");
        } else if (name == "h_neg_sobolev") {
          const auto res = h_neg_sobolev_norm(mu, ref, sobolev_s, grid);
          row.value = res.value;
          row.note = "boundary_fraction=" + format_real(res.boundary_fraction) +
                     (res.boundary_warning ? ";boundary_warning" : "");
        } else {
          row.value = tv_histogram(mu, ref, edges);
        }
        rows[r].push_back(row);
      }
    }
    draws[r] = init_rng.draw_counter() + dyn_rng.draw_counter() + ref_rng.draw_counter() + extra;
  });
  CsvWriter csv;
  csv.columns({"replica", "time", "metric", "value", "std_error", "note"});
  for (std::size_t r = 0; r < replicas; ++r) {
    for (const auto &row : rows[r]) {
      csv.row({std::uint64_t{r}, row.time, row.metric, row.value, row.se, row.note});
    }
  }
  write_header(csv, "metric", c);
  rate_convention_meta(csv, setup.model);
  const bool sliced = std::find(metrics.begin(), metrics.end(), "w2_sliced") != metrics.end();
  csv.meta("estimator.w2", sliced ? "sliced_monte_carlo" : "exact");
  csv.meta("estimator.tv", "binned_histogram_with_overflow_bins");
  std::uint64_t streams = 3 * replicas + (sliced ? replicas * setup.times.size() : 0);
  rng_meta(csv, streams, std::accumulate(draws.begin(), draws.end(), std::uint64_t{0}));
  return {0, csv.str(), {}};
}

// chaos-curve --------------------------------------------------------------

void fit_footer(CsvWriter &csv, const std::string &prefix, const RateFit &fit) {
  if (!fit.ok) {
    csv.footer(prefix + "fit_refused", fit.reason);
    return;
  }
  csv.footer(prefix + "fitted_slope", fit.slope);
  csv.footer(prefix + "fitted_intercept", fit.intercept);
  csv.footer(prefix + "slope_ci_low", fit.ci_low);
  csv.footer(prefix + "slope_ci_high", fit.ci_high);
}

RunResult cmd_chaos_curve(Config &c, const RunOptions &opt) {
  const std::uint64_t seed = seed_of(c, opt);
  const ModelSetup setup = resolve_model(c);
  ChaosOptions co;
  co.master_seed = seed;
  co.workers = opt.workers;
  co.time_grid = setup.times;
  for (auto v : c.get_uints("n_values", {64, 256, 1024, 4096})) co.n_values.push_back(v);
  const auto obs_names = c.get_strings("observables", {"compressed_sq:0", "tanh:0*tanh:0"});
  co.replicas = c.get_uint("replicas", 100);
  co.sample_budget = c.get_uint("sample_budget", 0);
  co.min_replicas = c.get_uint("min_replicas", 2);
  co.estimator = tuple_estimator_from_name(
      c.get_choice("estimator", "first_particles", {"first_particles", "disjoint_blocks"}));
  const std::string default_oracle =
      setup.model.kind == ModelKind::Vlasov ? "vlasov_quadrature" : "large_n";
  co.oracle.kind = oracle_kind_from_name(c.get_choice(
      "oracle", default_oracle, {"large_n", "gaussian_moments", "vlasov_quadrature"}));
  if (co.oracle.kind == OracleSpec::Kind::LargeN) {
    const std::size_t max_n = co.n_values.empty() ? 0 : co.n_values.back();
    co.oracle.n_ref = c.get_uint("n_ref", 16 * max_n);
    co.oracle.replicas = c.get_uint("oracle_replicas", 4);
  }
  if (co.oracle.kind == OracleSpec::Kind::VlasovQuadrature) {
    co.oracle.quadrature_nodes = c.get_uint("quadrature_nodes", 160);
  }
  co.bootstrap_samples = c.get_uint("bootstrap", 200);
  c.reject_unknown();

  CsvWriter csv;
  csv.columns({"observable", "N", "replicas", "error", "std_error", "argmax_time"});
  std::uint64_t streams = 0, draws = 0;
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < obs_names.size(); ++k) {
    const auto obs = ObservableProduct::parse(obs_names[k]);
    ChaosOptions local = co;
    // Separate oracle and replica streams per observable.
    local.master_seed = seed + 0x9E3779B97F4A7C15ull * k;
    const auto curve = chaos_error_curve(setup.model, setup.init, obs, local);
    for (std::size_t g = 0; g < curve.n_values.size(); ++g) {
      csv.row({curve.observable, std::uint64_t{curve.n_values[g]},
               std::uint64_t{curve.replicas[g]}, curve.errors[g], curve.std_errors[g],
               curve.argmax_time[g]});
    }
    const std::string prefix = curve.observable + ".";
    fit_footer(csv, prefix, rate_fit(curve, seed));
    csv.footer(prefix + "oracle", curve.oracle);
    csv.footer(prefix + "oracle_std_error", curve.oracle_std_error);
    if (curve.resolution_warning) {
      csv.footer(prefix + "warning", "oracle standard error within 3x of the smallest error");
      warnings.push_back(curve.observable + ": oracle resolution warning");
    }
    streams += curve.stream_count;
    draws += curve.draw_count;
  }
  write_header(csv, "chaos-curve", c);
  rate_convention_meta(csv, setup.model);
  csv.meta("estimator.tuple", to_string(co.estimator));
  csv.meta("estimator.oracle", to_string(co.oracle.kind));
  csv.meta("estimator.error", "max_over_time_grid_of_abs_gap");
  csv.meta("estimator.std_error", "replica_bootstrap");
  rng_meta(csv, streams, draws);
  return {0, csv.str(), warnings};
}

// omega-n ------------------------------------------------------------------

RunResult cmd_omega_n(Config &c, const RunOptions &opt) {
  const std::uint64_t seed = seed_of(c, opt);
  const std::size_t dim = c.get_uint("dimension", 3);
  if (dim == 0) throw ConfigError("key 'dimension': must be positive");
  const InitialLaw law = resolve_law(c, "initial", dim, false);
  const auto n_values = c.get_uints("n_values", {16, 64, 256, 1024, 4096});
  OmegaOptions o;
  o.master_seed = seed;
  o.workers = opt.workers;
  o.replicas = c.get_uint("replicas", 200);
  const std::size_t factor = c.get_uint("reference_factor", 64);
  o.n_projections = c.get_uint("n_projections", 64);
  const std::string est = c.get_choice(
      "estimator", "auto",
      {"auto", "exact_sorted_1d", "sliced_w2", "exact_matching_two_sample"});
  o.estimate_bias = c.get_bool("estimate_bias", true);
  c.reject_unknown();
  if (law.deterministic()) throw ConfigError("key 'initial': omega-n needs a random law");
  if (factor < 64) throw ConfigError("key 'reference_factor': must be >= 64");
  for (auto e : {OmegaEstimator::Auto, OmegaEstimator::ExactSorted, OmegaEstimator::Sliced,
                 OmegaEstimator::ExactTwoSample}) {
    if (est == to_string(e)) o.estimator = e;
  }
  const Sampler sampler = [&law](std::size_t n, RngStream &rng) { return law.sample(n, rng); };

  CsvWriter csv;
  csv.columns({"N", "mean", "std_error", "reference_size", "reference_bias", "bias_warning",
               "estimator"});
  ChaosCurve curve;
  std::uint64_t streams = 0, draws = 0;
  std::vector<std::string> warnings;
  for (std::size_t g = 0; g < n_values.size(); ++g) {
    o.group = static_cast<std::uint32_t>(g);
    o.reference_size = factor * n_values[g];
    const auto r = omega_n_estimator(sampler, n_values[g], o);
    csv.row({std::uint64_t{n_values[g]}, r.mean, r.std_error, std::uint64_t{r.reference_size},
             r.reference_bias, std::string(r.bias_warning ? "true" : "false"), r.estimator});
    if (r.bias_warning) warnings.push_back("N=" + std::to_string(n_values[g]) + ": reference bias");
    curve.n_values.push_back(n_values[g]);
    curve.errors.push_back(r.mean);
    curve.std_errors.push_back(r.std_error);
    streams += r.stream_count;
    draws += r.draw_count;
  }
  fit_footer(csv, "", rate_fit(curve, seed));
  write_header(csv, "omega-n", c);
  csv.meta("estimator.distance", "squared_w2");
  rng_meta(csv, streams, draws);
  return {0, csv.str(), warnings};
}

// check --------------------------------------------------------------------

RunResult cmd_check(Config &c, const RunOptions &opt) {
  const std::uint64_t seed = seed_of(c, opt);
  const std::size_t scale = c.get_uint("scale", 1);
  c.reject_unknown();
  CsvWriter csv;
  const bool ok = run_check_suite(seed, scale, opt.workers, csv);
  write_header(csv, "check", c);
  return {ok ? 0 : 1, csv.str(), {}};
}

} // namespace

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names{"simulate", "metric", "chaos-curve", "omega-n",
                                              "check"};
  return names;
}

ModelSetup resolve_model(Config &c) {
  ModelSetup s;
  const std::string model = c.get_choice(
      "model", "kac_elastic", {"kac_elastic", "mckean_vlasov", "vlasov", "inelastic_thermostat"});
  ModelConfig &m = s.model;
  m.kind = model_kind_from_name(model);
  m.dim = c.get_uint("dimension", m.kind == ModelKind::Vlasov ? 1 : 3);
  if (m.dim == 0) throw ConfigError("key 'dimension': must be positive");
  try {
    switch (m.kind) {
    case ModelKind::KacElastic:
    case ModelKind::InelasticThermostat: {
      const std::string kernel = c.get_choice("kernel", "isotropic", kernel_names());
      const double param = c.get_real("kernel_parameter", 1.0);
      m.kernel = AngularKernel::from_name(kernel, m.dim, param);
      const bool thermo = m.kind == ModelKind::InelasticThermostat;
      m.convention = c.get_choice("pair_convention", thermo ? "ordered" : "unordered",
                                  {"ordered", "unordered"}) == "ordered"
                         ? PairConvention::Ordered
                         : PairConvention::Unordered;
      if (thermo) {
        m.restitution.alpha = c.get_real("alpha", 0.8);
        m.restitution.nu = c.get_real("nu", 1.0);
        m.restitution.dim = m.dim;
      }
      break;
    }
    case ModelKind::McKeanVlasov: {
      const double drift = c.get_real("drift_coefficient", -1.0);
      const double noise = c.get_real("noise", 1.0);
      const std::string inter = c.get_choice("interaction", "linear", interaction_names());
      const auto kernel = InteractionKernel::from_name(
          inter, c.get_real("interaction_strength", 1.0), c.get_real("interaction_width", 1.0),
          c.get_real("interaction_screening", 1.0));
      m.drift_diffusion = DriftDiffusionSpec::isotropic(m.dim, drift, noise, kernel);
      m.drift_diffusion.mean_field_prefactor = c.get_bool("mean_field_prefactor", false);
      m.dt = c.get_real("dt", 0.01);
      break;
    }
    case ModelKind::Vlasov: {
      const std::string inter =
          c.get_choice("interaction", "gaussian_derivative", interaction_names());
      m.vlasov.space_dim = m.dim;
      m.vlasov.potential_gradient = InteractionKernel::from_name(
          inter, c.get_real("interaction_strength", 1.0), c.get_real("interaction_width", 1.0),
          c.get_real("interaction_screening", 1.0));
      m.dt = c.get_real("dt", 0.05);
      break;
    }
    }
    m.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string("model '") + model + "': " + e.what());
  }
  s.init = resolve_law(c, "initial", m.state_dim(), m.kind == ModelKind::Vlasov);
  if (s.init.dim() != m.state_dim()) {
    throw ConfigError("key 'initial': particle dimension " + std::to_string(s.init.dim()) +
                      " does not match the model state dimension " +
                      std::to_string(m.state_dim()));
  }
  s.t_end = c.get_real("t_end", 1.0);
  if (!(s.t_end >= 0.0)) throw ConfigError("key 't_end': must be nonnegative");
  auto times = default_times(s.t_end, 9);
  if (m.kind == ModelKind::McKeanVlasov || m.kind == ModelKind::Vlasov) {
    times = snap_to_lattice(times, m.dt);
  }
  s.times = c.get_reals("snapshot_times", times);
  if (s.times.empty() || !std::is_sorted(s.times.begin(), s.times.end()) ||
      s.times.front() < 0.0 || s.times.back() > s.t_end) {
    throw ConfigError("key 'snapshot_times': must be sorted within [0, t_end]");
  }
  return s;
}

void write_header(CsvWriter &csv, const std::string &subcommand, const Config &config) {
  csv.meta("tool", "mfchaos");
  csv.meta("version", kVersion);
  csv.meta("command", subcommand);
  for (const auto &[k, v] : config.resolved()) {
    csv.meta("config." + k, v);
  }
}

RunResult run(const std::string &subcommand, Config config, const RunOptions &options) {
  if (subcommand == "simulate") return cmd_simulate(config, options);
  if (subcommand == "metric") return cmd_metric(config, options);
  if (subcommand == "chaos-curve") return cmd_chaos_curve(config, options);
  if (subcommand == "omega-n") return cmd_omega_n(config, options);
  if (subcommand == "check") return cmd_check(config, options);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

} // namespace mfchaos::cli
