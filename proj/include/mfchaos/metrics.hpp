#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/core.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/spectral.hpp"

namespace mfchaos {

/// Largest N accepted by the cubic-time assignment solver.
inline constexpr std::size_t kAssignmentBudget = 4096;

struct TransportPlanResult {
  double cost = 0.0;                   // W_2^2 = (1/N) sum |a_i - b_{assignment[i]}|^2
  std::vector<std::size_t> assignment; // permutation of {0..N-1}
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// W_q^q between two 1-D empirical measures with arbitrary atom counts via
/// the monotone (quantile) coupling.
double wq_power_1d(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double q);

/// Same on pre-sorted values.
double wq_power_sorted(std::span<const double> a_sorted, std::span<const double> b_sorted,
                       double q);

double w1_exact_1d(const EmpiricalMeasure &a, const EmpiricalMeasure &b);

/// Exact W_2 matching between two N-point measures in any dimension.
/// 1-D inputs use the sorted coupling; otherwise a Hungarian solver.
/// Throws std::invalid_argument on unequal counts and std::length_error
/// above kAssignmentBudget.
TransportPlanResult w2_exact_matching(const EmpiricalMeasure &a, const EmpiricalMeasure &b);

/// Minimum-cost perfect matching for a dense n x n cost given by a callback.
/// Returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(std::size_t n,
                                          const std::function<double(std::size_t, std::size_t)> &cost);

/// Random unit directions for slicing (d normals normalized per direction).
std::vector<double> random_directions(std::size_t dim, std::size_t count, RngStream &rng);

/// Sorted projections of every atom on every direction (count rows of size N).
std::vector<std::vector<double>> sorted_projections(const EmpiricalMeasure &mu,
                                                    std::span<const double> directions);

/// Sliced W_2: sqrt of the mean over random directions of the 1-D W_2^2 of
/// the projections. The standard error comes from the spread over
/// directions (delta method on the square root).
Estimate w2_sliced(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                   std::size_t n_projections, RngStream &rng);

/// Sliced W_2^2 (mean over directions, with standard error) against
/// pre-sorted reference projections for the same directions.
Estimate sliced_w2_squared(const EmpiricalMeasure &a, std::span<const double> directions,
                           const std::vector<std::vector<double>> &reference_sorted);

/// Grid supremum of |F_a - F_b| / (1 + |xi|^2)^(s/2). Also reports where
/// the supremum sits so under-resolved grids (maximum at the boundary) can
/// be detected.
struct ToscaniResult {
  double value = 0.0;
  double argmax_xi = 0.0;
  bool at_boundary = false;
};

ToscaniResult toscani_norm(const GridSpectrum &a, const GridSpectrum &b, double s);
ToscaniResult toscani_norm(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double s,
                           const XiGrid &grid);

/// sqrt of the trapezoid integral of |F_a - F_b|^2 / (1 + |xi|^2)^s over
/// the grid. `boundary_warning` is set when the two boundary panels carry
/// more than 1% of the integral.
struct SobolevResult {
  double value = 0.0;
  double boundary_fraction = 0.0;
  bool boundary_warning = false;
};

SobolevResult h_neg_sobolev_norm(const GridSpectrum &a, const GridSpectrum &b, double s);
SobolevResult h_neg_sobolev_norm(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double s,
                                 const XiGrid &grid);

/// Binned total variation sum_bins |p_a - p_b| for 1-D samples. Two overflow
/// bins collect atoms below the first and at or above the last edge; the
/// last regular bin is closed on the right.
double tv_histogram(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                    std::span<const double> bin_edges);

/// Draws an n-particle i.i.d. sample from a law.
using Sampler = std::function<ParticleState(std::size_t n, RngStream &rng)>;

enum class OmegaEstimator { Auto, ExactSorted, Sliced, ExactTwoSample };
const char *to_string(OmegaEstimator e);

struct OmegaOptions {
  std::size_t replicas = 200;
  std::size_t reference_size = 0; // 0 selects 64 N
  std::size_t n_projections = 64;
  OmegaEstimator estimator = OmegaEstimator::Auto;
  std::uint64_t master_seed = 1;
  std::uint32_t group = 0; // stream group, e.g. index in an N-list
  std::size_t workers = 1;
  bool estimate_bias = true;
};

/// Monte Carlo estimate of E W_2(mu^N, f)^2.
///
/// The law f is represented by one reference sample of `reference_size`
/// points drawn once per call. Replicas draw N points and measure W_2^2
/// against the reference: exact sorted coupling in 1-D, sliced W_2 in
/// higher dimension (directions shared by all replicas). ExactTwoSample
/// instead matches each replica against an independent N-point sample with
/// the assignment solver, which needs no reference.
///
/// The reference-proxy bias is estimated by the same measurement at the
/// reference size against a reference twice as large.
struct OmegaEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double reference_bias = 0.0;
  bool bias_warning = false;
  std::string estimator;
  std::size_t reference_size = 0;
  std::vector<double> replica_values;
  std::uint64_t stream_count = 0;
  std::uint64_t draw_count = 0;
};

OmegaEstimate omega_n_estimator(const Sampler &sampler, std::size_t n,
                                const OmegaOptions &options);

} // namespace mfchaos
