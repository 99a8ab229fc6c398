#include "mfchaos/limit_oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mfchaos/parallel.hpp"

namespace mfchaos {

double FactorMoments::product(std::size_t t) const {
  double p = 1.0;
  for (double m : mean.at(t)) p *= m;
  return p;
}

namespace {

void summarize(FactorMoments &out, std::size_t n_times, std::size_t ell) {
  const std::size_t r = out.replica_values.size();
  out.mean.assign(n_times, std::vector<double>(ell, 0.0));
  out.std_error.assign(n_times, std::vector<double>(ell, 0.0));
  std::vector<double> column(r);
  for (std::size_t t = 0; t < n_times; ++t) {
    for (std::size_t j = 0; j < ell; ++j) {
      for (std::size_t k = 0; k < r; ++k) column[k] = out.replica_values[k][t][j];
      const double mean = pairwise_sum(column) / static_cast<double>(r);
      out.mean[t][j] = mean;
      if (r > 1) {
        for (auto &c : column) c = (c - mean) * (c - mean);
        out.std_error[t][j] =
            std::sqrt(pairwise_sum(column) / static_cast<double>(r - 1) / static_cast<double>(r));
      }
    }
  }
}

} // namespace

FactorMoments large_n_oracle(const ModelConfig &model, const InitialLaw &init,
                             const ObservableProduct &obs, double t_end,
                             std::span<const double> times, const LargeNOracleOptions &opt) {
  model.validate();
  obs.check_dim(model.state_dim());
  if (opt.replicas == 0 || opt.n_ref < 2) {
    throw std::invalid_argument("large_n_oracle: need replicas >= 1 and n_ref >= 2");
  }
  FactorMoments out;
  out.kind = "large_n_particle_system";
  out.times.assign(times.begin(), times.end());
  const std::size_t ell = obs.ell();
  out.replica_values.assign(opt.replicas, {});
  std::vector<std::uint64_t> draws(opt.replicas);
  parallel_for(opt.replicas, opt.workers, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    RngStream init_rng(opt.master_seed, stream_id(stream_tag::oracle_initial, 0, rep));
    RngStream dyn_rng(opt.master_seed, stream_id(stream_tag::oracle_dynamics, 0, rep));
    const auto snaps = run_model(model, init.sample(opt.n_ref, init_rng), t_end, times, dyn_rng);
    std::vector<std::vector<double>> values(snaps.size(), std::vector<double>(ell));
    for (std::size_t t = 0; t < snaps.size(); ++t) {
      const auto mu = empirical_from_state(snaps[t]);
      for (std::size_t j = 0; j < ell; ++j) {
        const auto &phi = obs.factors()[j];
        values[t][j] = mu.average([&](std::span<const double> z) { return phi(z); });
      }
    }
    out.replica_values[r] = std::move(values);
    draws[r] = init_rng.draw_counter() + dyn_rng.draw_counter();
  });
  summarize(out, times.size(), ell);
  out.stream_count = 2 * opt.replicas;
  for (auto d : draws) out.draw_count += d;
  return out;
}

Estimate kac_limit_oracle(const InitialLaw &init, const AngularKernel &kernel, double t,
                          const Observable &phi, std::size_t n_ref, std::size_t replicas,
                          std::uint64_t master_seed, std::size_t workers,
                          PairConvention convention) {
  ModelConfig model;
  model.kind = ModelKind::KacElastic;
  model.dim = kernel.dim();
  model.kernel = kernel;
  model.convention = convention;
  const double times[] = {t};
  const auto m = large_n_oracle(model, init, ObservableProduct({phi}), t, times,
                                {n_ref, replicas, master_seed, workers});
  return {m.mean[0][0], m.std_error[0][0]};
}

QuadratureRule gauss_hermite_rule(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("gauss_hermite_rule: need at least one node");
  }
  // Jacobi matrix of the monic probabilists' Hermite recurrence:
  // x He_k = He_{k+1} + k He_{k-1}.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("gauss_hermite_rule: eigen decomposition failed");
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    rule.nodes[k] = eig.eigenvalues()(static_cast<Eigen::Index>(k));
    const double v0 = eig.eigenvectors()(0, static_cast<Eigen::Index>(k));
    rule.weights[k] = v0 * v0;
  }
  // Exact symmetry of the rule.
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (rule.nodes[n - 1 - k] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[n - 1 - k] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double gaussian_expectation(const Observable &phi, std::span<const double> mean,
                            std::span<const double> variance, std::size_t nodes) {
  const std::size_t d = mean.size();
  if (variance.size() != d || d == 0) {
    throw std::invalid_argument("gaussian_expectation: mean/variance size mismatch");
  }
  phi.check_dim(d);
  const auto rule = gauss_hermite_rule(nodes);
  std::vector<double> z(d);
  // Observables depend on one coordinate or factor over coordinates, so a
  // full tensor rule is only needed for gauss_bump.
  if (phi.kind() == Observable::Kind::GaussBump) {
    double product = 1.0;
    for (std::size_t c = 0; c < d; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < nodes; ++k) {
        const double x = mean[c] + std::sqrt(variance[c]) * rule.nodes[k];
        s += rule.weights[k] * std::exp(-0.5 * x * x);
      }
      product *= s;
    }
    return product;
  }
  const std::size_t c = phi.coordinate();
  for (std::size_t k = 0; k < d; ++k) z[k] = mean[k];
  double s = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    z[c] = mean[c] + std::sqrt(variance[c]) * rule.nodes[k];
    s += rule.weights[k] * phi(z);
  }
  return s;
}

FactorMoments gaussian_moment_oracle(const DriftDiffusionSpec &spec, const InitialLaw &init,
                                     const ObservableProduct &obs,
                                     std::span<const double> times) {
  if (init.kind != InitialLaw::Kind::Gaussian) {
    throw std::invalid_argument("gaussian_moment_oracle: needs a Gaussian initial law");
  }
  obs.check_dim(spec.dim);
  const auto traj = mkv_moment_closed_form(spec, init.mean, init.variances, times);
  FactorMoments out;
  out.kind = "gaussian_moment_ode";
  out.times.assign(times.begin(), times.end());
  out.mean.assign(times.size(), std::vector<double>(obs.ell()));
  out.std_error.assign(times.size(), std::vector<double>(obs.ell(), 0.0));
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (std::size_t j = 0; j < obs.ell(); ++j) {
      out.mean[t][j] =
          gaussian_expectation(obs.factors()[j], traj.mean[t], traj.variance[t], 64);
    }
  }
  return out;
}

double WeightedAtoms::average(const Observable &phi) const {
  std::vector<double> terms(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    terms[k] = weights[k] * phi(std::span<const double>(points.data() + k * dim, dim));
  }
  return pairwise_sum(terms);
}

std::vector<WeightedAtoms> vlasov_quadrature_oracle(const VlasovSpec &spec,
                                                    const InitialLaw &init, std::size_t nodes,
                                                    double t_end, double dt,
                                                    std::span<const double> times) {
  if (spec.space_dim != 1) {
    throw std::invalid_argument("vlasov_quadrature_oracle: 1-D Vlasov only");
  }
  if (init.kind != InitialLaw::Kind::Quantile || init.dim() != 2) {
    throw std::invalid_argument(
        "vlasov_quadrature_oracle: needs a quantile (cold) initial law on (x, v)");
  }
  const auto steps = snapshot_steps(times, 0.0, t_end, dt);
  const auto rule = gauss_hermite_rule(nodes);
  const std::size_t n = nodes;
  const double sd = std::sqrt(init.variances[0]);
  std::vector<double> x(n), v(n, init.mean[1]), w = rule.weights;
  for (std::size_t k = 0; k < n; ++k) x[k] = init.mean[0] + sd * rule.nodes[k];

  std::vector<double> acc(n), xm(n), vm(n);
  auto accelerations = [&](const std::vector<double> &pos) {
    double dx, g;
    for (std::size_t k = 0; k < n; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        dx = pos[k] - pos[j];
        spec.potential_gradient.evaluate(std::span<const double>(&dx, 1),
                                         std::span<double>(&g, 1));
        a += w[j] * g;
      }
      acc[k] = a;
    }
  };
  auto snapshot = [&] {
    WeightedAtoms atoms;
    atoms.dim = 2;
    atoms.points.resize(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      atoms.points[2 * k] = x[k];
      atoms.points[2 * k + 1] = v[k];
    }
    atoms.weights = w;
    return atoms;
  };
  std::vector<WeightedAtoms> out;
  std::size_t done = 0;
  for (std::size_t target : steps) {
    while (done < target) {
      accelerations(x);
      for (std::size_t k = 0; k < n; ++k) {
        xm[k] = x[k] + 0.5 * dt * v[k];
        vm[k] = v[k] + 0.5 * dt * acc[k];
      }
      accelerations(xm);
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += dt * vm[k];
        v[k] += dt * acc[k];
      }
      ++done;
    }
    out.push_back(snapshot());
  }
  return out;
}

FactorMoments vlasov_quadrature_moments(const VlasovSpec &spec, const InitialLaw &init,
                                        const ObservableProduct &obs, std::size_t nodes,
                                        double t_end, double dt, std::span<const double> times) {
  obs.check_dim(2 * spec.space_dim);
  const auto atoms = vlasov_quadrature_oracle(spec, init, nodes, t_end, dt, times);
  FactorMoments out;
  out.kind = "vlasov_gauss_hermite_" + std::to_string(nodes);
  out.times.assign(times.begin(), times.end());
  out.mean.assign(times.size(), std::vector<double>(obs.ell()));
  out.std_error.assign(times.size(), std::vector<double>(obs.ell(), 0.0));
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (std::size_t j = 0; j < obs.ell(); ++j) {
      out.mean[t][j] = atoms[t].average(obs.factors()[j]);
    }
  }
  return out;
}

} // namespace mfchaos
