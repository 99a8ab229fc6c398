#include "mfchaos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mfchaos/parallel.hpp"

namespace mfchaos {

namespace {

std::vector<double> sorted_1d(const EmpiricalMeasure &mu) {
  if (mu.dim() != 1) {
    throw std::invalid_argument("1-D atoms required");
  }
  std::vector<double> x(mu.atoms().begin(), mu.atoms().end());
  std::sort(x.begin(), x.end());
  return x;
}

double power(double x, double q) {
  if (q == 1.0) return x;
  if (q == 2.0) return x * x;
  return std::pow(x, q);
}

Estimate mean_and_error(const std::vector<double> &values) {
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() < 2) {
    return {mean, 0.0};
  }
  std::vector<double> sq(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    sq[k] = (values[k] - mean) * (values[k] - mean);
  }
  return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0) / n)};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

} // namespace

double wq_power_sorted(std::span<const double> a, std::span<const double> b, double q) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("wq_power_sorted: empty input");
  }
  if (!(q >= 1.0)) {
    throw std::invalid_argument("wq_power_sorted: q must be >= 1");
  }
  // Quantile positions in units of 1/(n m): atom i of a covers
  // [i m, (i+1) m), atom j of b covers [j n, (j+1) n).
  const std::uint64_t n = a.size(), m = b.size();
  std::uint64_t pos = 0;
  std::size_t i = 0, j = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t end_a = (i + 1) * m, end_b = (j + 1) * n;
    const std::uint64_t next = std::min(end_a, end_b);
    total += static_cast<double>(next - pos) * power(std::abs(a[i] - b[j]), q);
    pos = next;
    if (next == end_a) ++i;
    if (next == end_b) ++j;
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

double wq_power_1d(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double q) {
  const auto x = sorted_1d(a), y = sorted_1d(b);
  return wq_power_sorted(x, y, q);
}

double w1_exact_1d(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
  return wq_power_1d(a, b, 1.0);
}

std::vector<std::size_t>
solve_assignment(std::size_t n, const std::function<double(std::size_t, std::size_t)> &cost) {
  // Shortest augmenting paths with row/column potentials (Kuhn-Munkres,
  // O(n^3)). Index 0 is a virtual column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) {
    assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

TransportPlanResult w2_exact_matching(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("w2_exact_matching: dimension mismatch");
  }
  if (a.size() != b.size()) {
    throw std::invalid_argument("w2_exact_matching: atom counts differ");
  }
  const std::size_t n = a.size();
  if (n > kAssignmentBudget) {
    std::ostringstream msg;
    msg << "w2_exact_matching: N=" << n << " exceeds the assignment budget "
        << kAssignmentBudget << "; use w2_sliced";
    throw std::length_error(msg.str());
  }
  TransportPlanResult out;
  if (a.dim() == 1) {
    std::vector<std::size_t> ia(n), ib(n);
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    auto by = [](const EmpiricalMeasure &m) {
      return [&m](std::size_t x, std::size_t y) {
        return m.atom(x)[0] < m.atom(y)[0] || (m.atom(x)[0] == m.atom(y)[0] && x < y);
      };
    };
    std::sort(ia.begin(), ia.end(), by(a));
    std::sort(ib.begin(), ib.end(), by(b));
    out.assignment.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.assignment[ia[k]] = ib[k];
    }
  } else {
    out.assignment = solve_assignment(
        n, [&](std::size_t i, std::size_t j) { return squared_distance(a.atom(i), b.atom(j)); });
  }
  std::vector<double> costs(n);
  for (std::size_t i = 0; i < n; ++i) {
    costs[i] = squared_distance(a.atom(i), b.atom(out.assignment[i]));
  }
  out.cost = pairwise_sum(costs) / static_cast<double>(n);
  return out;
}

std::vector<double> random_directions(std::size_t dim, std::size_t count, RngStream &rng) {
  std::vector<double> dirs(dim * count);
  for (std::size_t k = 0; k < count; ++k) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        dirs[k * dim + c] = rng.normal();
        norm2 += dirs[k * dim + c] * dirs[k * dim + c];
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t c = 0; c < dim; ++c) {
      dirs[k * dim + c] *= inv;
    }
  }
  return dirs;
}

std::vector<std::vector<double>> sorted_projections(const EmpiricalMeasure &mu,
                                                    std::span<const double> directions) {
  const std::size_t d = mu.dim();
  if (directions.size() % d != 0) {
    throw std::invalid_argument("sorted_projections: direction array size");
  }
  const std::size_t count = directions.size() / d;
  std::vector<std::vector<double>> out(count, std::vector<double>(mu.size()));
  for (std::size_t k = 0; k < count; ++k) {
    const auto dir = directions.subspan(k * d, d);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto z = mu.atom(i);
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += z[c] * dir[c];
      out[k][i] = s;
    }
    std::sort(out[k].begin(), out[k].end());
  }
  return out;
}

Estimate sliced_w2_squared(const EmpiricalMeasure &a, std::span<const double> directions,
                           const std::vector<std::vector<double>> &reference_sorted) {
  const auto proj = sorted_projections(a, directions);
  if (proj.size() != reference_sorted.size()) {
    throw std::invalid_argument("sliced_w2_squared: direction count mismatch");
  }
  std::vector<double> per(proj.size());
  for (std::size_t k = 0; k < proj.size(); ++k) {
    per[k] = wq_power_sorted(proj[k], reference_sorted[k], 2.0);
  }
  return mean_and_error(per);
}

Estimate w2_sliced(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                   std::size_t n_projections, RngStream &rng) {
  if (n_projections == 0) {
    throw std::invalid_argument("w2_sliced: need at least one projection");
  }
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("w2_sliced: dimension mismatch");
  }
  const auto dirs = random_directions(a.dim(), n_projections, rng);
  const Estimate sq = sliced_w2_squared(a, dirs, sorted_projections(b, dirs));
  const double value = std::sqrt(std::max(sq.value, 0.0));
  const double se = value > 0.0 ? sq.std_error / (2.0 * value) : 0.0;
  return {value, se};
}

namespace {

struct GridDifference {
  std::vector<double> modulus;
  std::vector<double> xi;
};

GridDifference difference(const GridSpectrum &a, const GridSpectrum &b) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("spectra live on different grids");
  }
  GridDifference d{std::vector<double>(a.values.size()), a.grid.nodes()};
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    d.modulus[k] = std::abs(a.values[k] - b.values[k]);
  }
  return d;
}

} // namespace

ToscaniResult toscani_norm(const GridSpectrum &a, const GridSpectrum &b, double s) {
  if (!(s > 0.0)) {
    throw std::invalid_argument("toscani_norm: s must be positive");
  }
  const auto d = difference(a, b);
  ToscaniResult r;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < d.xi.size(); ++k) {
    const double w = std::pow(1.0 + d.xi[k] * d.xi[k], -0.5 * s);
    const double v = d.modulus[k] * w;
    if (v > r.value) {
      r.value = v;
      arg = k;
    }
  }
  r.argmax_xi = d.xi[arg];
  r.at_boundary = r.value > 0.0 && (arg == 0 || arg + 1 == d.xi.size());
  return r;
}

ToscaniResult toscani_norm(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double s,
                           const XiGrid &grid) {
  return toscani_norm(char_from_empirical(a, grid), char_from_empirical(b, grid), s);
}

SobolevResult h_neg_sobolev_norm(const GridSpectrum &a, const GridSpectrum &b, double s) {
  if (!(s >= 1.0)) {
    throw std::invalid_argument("h_neg_sobolev_norm: s must be >= 1");
  }
  const auto d = difference(a, b);
  const std::size_t n = d.xi.size();
  const double h = a.grid.spacing();
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = d.modulus[k] * d.modulus[k] * std::pow(1.0 + d.xi[k] * d.xi[k], -s);
  }
  std::vector<double> panels(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    panels[k] = 0.5 * h * (f[k] + f[k + 1]);
  }
  const double total = pairwise_sum(panels);
  SobolevResult r;
  r.value = std::sqrt(total);
  if (total > 0.0) {
    r.boundary_fraction = (panels.front() + panels.back()) / total;
    r.boundary_warning = r.boundary_fraction > 0.01;
  }
  return r;
}

SobolevResult h_neg_sobolev_norm(const EmpiricalMeasure &a, const EmpiricalMeasure &b, double s,
                                 const XiGrid &grid) {
  return h_neg_sobolev_norm(char_from_empirical(a, grid), char_from_empirical(b, grid), s);
}

double tv_histogram(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                    std::span<const double> edges) {
  if (a.dim() != 1 || b.dim() != 1) {
    throw std::invalid_argument("tv_histogram: 1-D atoms required");
  }
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("tv_histogram: edges must be strictly increasing (>= 2)");
  }
  const std::size_t bins = edges.size() - 1;
  // Slot 0: below the first edge; slots 1..bins: regular; slot bins+1: above.
  auto histogram = [&](const EmpiricalMeasure &mu) {
    std::vector<double> mass(bins + 2, 0.0);
    for (double x : mu.atoms()) {
      std::size_t slot;
      if (x < edges.front()) {
        slot = 0;
      } else if (x > edges.back()) {
        slot = bins + 1;
      } else if (x == edges.back()) {
        slot = bins;
      } else {
        slot = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                        edges.begin());
      }
      mass[slot] += mu.weight();
    }
    return mass;
  };
  const auto pa = histogram(a), pb = histogram(b);
  std::vector<double> diff(pa.size());
  for (std::size_t k = 0; k < pa.size(); ++k) {
    diff[k] = std::abs(pa[k] - pb[k]);
  }
  return pairwise_sum(diff);
}

const char *to_string(OmegaEstimator e) {
  switch (e) {
  case OmegaEstimator::Auto: return "auto";
  case OmegaEstimator::ExactSorted: return "exact_sorted_1d";
  case OmegaEstimator::Sliced: return "sliced_w2";
  case OmegaEstimator::ExactTwoSample: return "exact_matching_two_sample";
  }
  return "?";
}

OmegaEstimate omega_n_estimator(const Sampler &sampler, std::size_t n,
                                const OmegaOptions &opt) {
  if (n == 0 || opt.replicas == 0) {
    throw std::invalid_argument("omega_n_estimator: N and replicas must be positive");
  }
  OmegaEstimate out;
  const std::uint32_t group = opt.group;
  const std::uint64_t seed = opt.master_seed;

  RngStream probe_rng(seed, stream_id(stream_tag::auxiliary, group, 0));
  const std::size_t dim = sampler(1, probe_rng).dim();

  OmegaEstimator est = opt.estimator;
  if (est == OmegaEstimator::Auto) {
    est = dim == 1 ? OmegaEstimator::ExactSorted : OmegaEstimator::Sliced;
  }
  if (est == OmegaEstimator::ExactSorted && dim != 1) {
    throw std::invalid_argument("omega_n_estimator: sorted coupling needs 1-D samples");
  }
  out.estimator = to_string(est);

  std::vector<double> values(opt.replicas);
  std::vector<std::uint64_t> draws(opt.replicas, 0);
  std::uint64_t fixed_draws = 0, fixed_streams = 0;

  if (est == OmegaEstimator::ExactTwoSample) {
    parallel_for(opt.replicas, opt.workers, [&](std::size_t r) {
      RngStream rng(seed, stream_id(stream_tag::replica_sample, group,
                                    static_cast<std::uint32_t>(r)));
      const auto x = empirical_from_state(sampler(n, rng));
      const auto y = empirical_from_state(sampler(n, rng));
      values[r] = w2_exact_matching(x, y).cost;
      draws[r] = rng.draw_counter();
    });
  } else {
    const std::size_t m = opt.reference_size == 0 ? 64 * n : opt.reference_size;
    if (m < 64 * n) {
      throw std::invalid_argument("omega_n_estimator: reference_size must be >= 64 N");
    }
    out.reference_size = m;
    RngStream ref_rng(seed, stream_id(stream_tag::reference, group, 0));
    const auto reference = empirical_from_state(sampler(m, ref_rng));
    fixed_draws += ref_rng.draw_counter();
    ++fixed_streams;

    std::vector<double> dirs;
    std::vector<std::vector<double>> ref_sorted;
    if (est == OmegaEstimator::Sliced) {
      RngStream dir_rng(seed, stream_id(stream_tag::directions, group, 0));
      dirs = random_directions(dim, opt.n_projections, dir_rng);
      fixed_draws += dir_rng.draw_counter();
      ++fixed_streams;
      ref_sorted = sorted_projections(reference, dirs);
    } else {
      ref_sorted.push_back(sorted_1d(reference));
    }
    auto measure = [&](const EmpiricalMeasure &x,
                       const std::vector<std::vector<double>> &sorted_ref) {
      if (est == OmegaEstimator::Sliced) {
        return sliced_w2_squared(x, dirs, sorted_ref).value;
      }
      const auto xs = sorted_1d(x);
      return wq_power_sorted(xs, sorted_ref[0], 2.0);
    };
    parallel_for(opt.replicas, opt.workers, [&](std::size_t r) {
      RngStream rng(seed, stream_id(stream_tag::replica_sample, group,
                                    static_cast<std::uint32_t>(r)));
      values[r] = measure(empirical_from_state(sampler(n, rng)), ref_sorted);
      draws[r] = rng.draw_counter();
    });
    if (opt.estimate_bias) {
      RngStream bias_rng(seed, stream_id(stream_tag::bias, group, 0));
      const auto big = empirical_from_state(sampler(2 * m, bias_rng));
      const auto probe = empirical_from_state(sampler(m, bias_rng));
      fixed_draws += bias_rng.draw_counter();
      ++fixed_streams;
      std::vector<std::vector<double>> big_sorted;
      if (est == OmegaEstimator::Sliced) {
        big_sorted = sorted_projections(big, dirs);
      } else {
        big_sorted.push_back(sorted_1d(big));
      }
      out.reference_bias = measure(probe, big_sorted);
    }
  }
  const Estimate e = mean_and_error(values);
  out.mean = e.value;
  out.std_error = e.std_error;
  out.bias_warning = out.reference_bias > 0.1 * out.mean;
  out.replica_values = std::move(values);
  out.stream_count = fixed_streams + opt.replicas;
  out.draw_count = fixed_draws + std::accumulate(draws.begin(), draws.end(), std::uint64_t{0});
  return out;
}

} // namespace mfchaos
