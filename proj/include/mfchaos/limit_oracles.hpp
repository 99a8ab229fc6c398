#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/metrics.hpp"
#include "mfchaos/models.hpp"
#include "mfchaos/observables.hpp"

namespace mfchaos {

/// Reference values <phi_j, f_t> of the limit law for every factor of an
/// observable product at every time of a grid.
struct FactorMoments {
  std::string kind;
  std::vector<double> times;
  std::vector<std::vector<double>> mean;      // [time][factor]
  std::vector<std::vector<double>> std_error; // [time][factor]
  /// Per-replica values [replica][time][factor]; empty for deterministic oracles.
  std::vector<std::vector<std::vector<double>>> replica_values;
  std::uint64_t stream_count = 0;
  std::uint64_t draw_count = 0;

  /// prod_j mean[t][j].
  double product(std::size_t t) const;
};

struct LargeNOracleOptions {
  std::size_t n_ref = 65536;
  std::size_t replicas = 4;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
};

/// Approximates the limit law by the n_ref-particle system itself. Each
/// replica runs one system; its empirical factor averages are one sample of
/// <phi_j, f_t>, and the replica spread gives the standard error.
FactorMoments large_n_oracle(const ModelConfig &model, const InitialLaw &init,
                             const ObservableProduct &obs, double t_end,
                             std::span<const double> times, const LargeNOracleOptions &options);

/// Single observable, single time, elastic Kac system.
Estimate kac_limit_oracle(const InitialLaw &init, const AngularKernel &kernel, double t,
                          const Observable &phi, std::size_t n_ref, std::size_t replicas,
                          std::uint64_t master_seed, std::size_t workers = 1,
                          PairConvention convention = PairConvention::Unordered);

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)/sqrt(2 pi)); weights
/// sum to one. Nodes come from the symmetric Jacobi matrix (Golub-Welsch).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_rule(std::size_t nodes);

/// E phi(Z) for Z ~ N(mean, diag(variance)) by a tensor Gauss-Hermite rule.
double gaussian_expectation(const Observable &phi, std::span<const double> mean,
                            std::span<const double> variance, std::size_t nodes = 40);

/// Linear McKean-Vlasov from a Gaussian law: f_t stays Gaussian with the
/// moments of mkv_moment_closed_form, and <phi_j, f_t> is a Gaussian
/// expectation.
FactorMoments gaussian_moment_oracle(const DriftDiffusionSpec &spec, const InitialLaw &init,
                                     const ObservableProduct &obs,
                                     std::span<const double> times);

/// Weighted atoms sum_k w_k delta_{z_k}.
struct WeightedAtoms {
  std::size_t dim = 0;
  std::vector<double> points;
  std::vector<double> weights;
  double average(const Observable &phi) const;
};

/// Mean-field limit of the 1-D Vlasov system from the cold start
/// x ~ N(x_mean, x_var), v = v0 (the law of a quantile InitialLaw). The
/// initial law is replaced by a Gauss-Hermite rule with `nodes` atoms and
/// the weighted atoms follow the characteristic flow
///   x_k' = v_k,  v_k' = sum_j w_j grad_psi(x_k - x_j),
/// integrated with the same explicit midpoint scheme and step as the
/// particle system.
std::vector<WeightedAtoms> vlasov_quadrature_oracle(const VlasovSpec &spec,
                                                    const InitialLaw &init, std::size_t nodes,
                                                    double t_end, double dt,
                                                    std::span<const double> times);

FactorMoments vlasov_quadrature_moments(const VlasovSpec &spec, const InitialLaw &init,
                                        const ObservableProduct &obs, std::size_t nodes,
                                        double t_end, double dt, std::span<const double> times);

} // namespace mfchaos
