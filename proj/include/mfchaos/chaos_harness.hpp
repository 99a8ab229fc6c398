#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/limit_oracles.hpp"
#include "mfchaos/metrics.hpp"
#include "mfchaos/models.hpp"
#include "mfchaos/observables.hpp"
#include "mfchaos/spectral.hpp"

namespace mfchaos {

/// Gap between R^ell[phi](mu^N_Z) and the symmetrization of
/// phi (x) 1^{N - ell}, together with the bound 2 ell^2 |phi|_inf / N.
/// The symmetrized value is the average of prod_j phi_j(z_{i_j}) over all
/// injective index tuples, which equals the average over all N!
/// permutations. Exhaustive when the tuple count is at most
/// `exhaustive_limit`, otherwise estimated from `samples` random tuples.
struct SymmetrizationGap {
  double gap = 0.0;
  double bound = 0.0;
  double symmetrized = 0.0;
  double polynomial = 0.0;
  bool exhaustive = true;
  double mc_error = 0.0;
  bool within_bound() const { return gap <= bound; }
};

SymmetrizationGap symmetrization_gap(const ParticleState &z, const ObservableProduct &obs,
                                     RngStream *rng = nullptr, std::size_t samples = 100000,
                                     std::size_t exhaustive_limit = 2000000);

/// Average over all N! permutations, by explicit enumeration (N <= 10).
double symmetrized_by_permutations(const ParticleState &z, const ObservableProduct &obs);

/// How E[prod_j phi_j(Z_j)] is estimated from one replica.
///  - FirstParticles: particles 1..ell only.
///  - DisjointBlocks: average over the floor(N/ell) disjoint blocks
///    (b ell + 1, ..., b ell + ell); unbiased by exchangeability with
///    lower variance.
enum class TupleEstimator { FirstParticles, DisjointBlocks };
const char *to_string(TupleEstimator e);
TupleEstimator tuple_estimator_from_name(const std::string &name);

/// Value of the estimator on one state.
double tuple_statistic(const ParticleState &state, const ObservableProduct &obs,
                       TupleEstimator estimator);

struct OracleSpec {
  enum class Kind { LargeN, GaussianMoments, VlasovQuadrature };
  Kind kind = Kind::LargeN;
  std::size_t n_ref = 65536;
  std::size_t replicas = 4;
  std::size_t quadrature_nodes = 160;
};
const char *to_string(OracleSpec::Kind k);
OracleSpec::Kind oracle_kind_from_name(const std::string &name);

struct ChaosOptions {
  std::vector<std::size_t> n_values;
  std::vector<double> time_grid;
  /// Replicas per N: fixed count, or (when sample_budget > 0) enough
  /// replicas that replicas * tuples-per-replica reaches the budget, never
  /// fewer than min_replicas.
  std::size_t replicas = 100;
  std::size_t sample_budget = 0;
  std::size_t min_replicas = 2;
  TupleEstimator estimator = TupleEstimator::FirstParticles;
  OracleSpec oracle;
  std::size_t bootstrap_samples = 200;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
};

/// Errors of a marginal observable across N.
struct ChaosCurve {
  std::string model;
  std::string observable;
  std::string estimator;
  std::string oracle;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> replicas;
  std::vector<double> errors;     // max over the time grid of |gap|
  std::vector<double> std_errors; // bootstrap standard errors
  std::vector<double> argmax_time;
  /// Bootstrap replicates [b][k] of the errors, shared resampling of the
  /// oracle within each replicate.
  std::vector<std::vector<double>> bootstrap_errors;
  double oracle_std_error = 0.0; // of the oracle product, max over times
  bool resolution_warning = false;
  std::uint64_t stream_count = 0;
  std::uint64_t draw_count = 0;
};

/// sup_t |E prod_j phi_j(Z_{j,t}) - prod_j <phi_j, f_t>| estimated for every N.
ChaosCurve chaos_error_curve(const ModelConfig &model, const InitialLaw &init,
                             const ObservableProduct &obs, const ChaosOptions &options);

/// Builds the reference values used by chaos_error_curve.
FactorMoments build_oracle(const ModelConfig &model, const InitialLaw &init,
                           const ObservableProduct &obs, std::span<const double> times,
                           const OracleSpec &spec, std::uint64_t master_seed,
                           std::size_t workers);

struct RateFit {
  bool ok = false;
  std::string reason; // set when the fit is refused
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Least squares of log(error) on log(N). Needs at least 4 N values
/// spanning at least 1.5 decades and every error more than 2 standard
/// errors above 0. The 95% interval comes from refitting the bootstrap
/// replicates of the curve when present, otherwise from Gaussian
/// perturbations of the errors by their standard errors.
RateFit rate_fit(const ChaosCurve &curve, std::uint64_t seed = 1,
                 std::size_t parametric_samples = 2000);

/// Least squares slope and intercept of y on x.
std::pair<double, double> least_squares(std::span<const double> x, std::span<const double> y);

struct ContractionPoint {
  double time;
  double w2;
  double std_error;
};

struct TanakaCheck {
  std::vector<ContractionPoint> points;
  bool passed = true;
  double worst_excess_in_se = 0.0; // max over t of (W2(t) - W2(0)) / pooled SE
  std::uint64_t stream_count = 0;
  std::uint64_t draw_count = 0;
};

/// Two elastic Kac systems driven by the same random numbers: initial
/// states from the same draws pushed through each law (for Gaussian laws
/// this is the monotone coupling), then identical event streams. The
/// coupling cost (1/N) sum_i |v_i - v~_i|^2 averaged over replicas bounds
/// W_2^2 between the one-particle laws from above. The check fails if any
/// later estimate exceeds the t = 0 value by more than 2 pooled standard
/// errors. Only the elastic model is accepted.
TanakaCheck tanaka_contraction_check(const ModelConfig &model, const InitialLaw &a,
                                     const InitialLaw &b, std::span<const double> times,
                                     std::size_t n, std::size_t replicas,
                                     std::uint64_t master_seed, std::size_t workers = 1);

struct FourierContraction {
  double max_ratio = 0.0;
  double argmax_time = 0.0;
  bool identical_inputs = false;
  SpectralInvariants invariants_a;
  SpectralInvariants invariants_b;
  std::vector<double> times;
  std::vector<double> distances; // |f_t - g_t|_s
};

/// Evolves two spectra and returns the largest
/// |f_t - g_t|_s / (exp(2t) |f_in - g_in|_s) over the steps of [0, T].
FourierContraction fourier_contraction_check(const GridSpectrum &a, const GridSpectrum &b,
                                             const BobylevParams &params, double s, double T,
                                             double dt);

} // namespace mfchaos
