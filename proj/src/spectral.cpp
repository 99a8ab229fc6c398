#include "mfchaos/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfchaos {

XiGrid::XiGrid(double half_width, std::size_t intervals)
    : half_width_(half_width), intervals_(intervals) {
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("XiGrid: half width must be positive");
  }
  if (intervals < 4 || intervals % 2 != 0) {
    throw std::invalid_argument("XiGrid: interval count must be even and >= 4");
  }
  spacing_ = 2.0 * half_width / static_cast<double>(intervals);
}

std::vector<double> XiGrid::nodes() const {
  std::vector<double> xs(size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = node(k);
  }
  xs[center()] = 0.0;
  return xs;
}

GridSpectrum::GridSpectrum(XiGrid g, std::vector<std::complex<double>> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("GridSpectrum: value count does not match the grid");
  }
}

GridSpectrum gaussian_spectrum(const XiGrid &grid, double mean, double variance) {
  if (!(variance >= 0.0)) {
    throw std::invalid_argument("gaussian_spectrum: negative variance");
  }
  const auto xs = grid.nodes();
  std::vector<std::complex<double>> v(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double xi = xs[k];
    v[k] = std::exp(-0.5 * variance * xi * xi) *
           std::complex<double>(std::cos(mean * xi), -std::sin(mean * xi));
  }
  return {grid, std::move(v)};
}

GridSpectrum char_from_empirical(const EmpiricalMeasure &mu, const XiGrid &grid) {
  if (mu.dim() != 1) {
    throw std::invalid_argument("char_from_empirical: 1-D atoms only");
  }
  const auto xs = grid.nodes();
  std::vector<std::complex<double>> v(xs.size());
  const double w = mu.weight();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double phase = xs[k] * mu.atom(j)[0];
      re += std::cos(phase);
      im -= std::sin(phase);
    }
    v[k] = {re * w, im * w};
  }
  return {grid, std::move(v)};
}

BobylevParams BobylevParams::from_kernel(const AngularKernel &kernel, double alpha,
                                         bool with_diffusion, double nu) {
  if (kernel.kind() != AngularKernel::Kind::TwoPoint) {
    throw std::invalid_argument("BobylevParams: the spectral solver needs a 1-D kernel");
  }
  return {alpha, kernel.b_plus(), kernel.b_minus(), with_diffusion, nu};
}

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Centered slopes under the Hyman monotonicity filter: zero at data extrema,
// otherwise clipped to 3 min(|delta|). Exact on quadratics, so the curvature
// at xi = 0 (the energy) is carried consistently.
std::vector<double> monotone_slopes(const std::vector<double> &y, double h) {
  const std::size_t n = y.size();
  std::vector<double> delta(n - 1), d(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    delta[k] = (y[k + 1] - y[k]) / h;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = delta[k - 1], b = delta[k];
    if (a * b > 0.0) {
      const double limit = 3.0 * std::min(std::abs(a), std::abs(b));
      d[k] = sign(a) * std::min(std::abs(0.5 * (a + b)), limit);
    }
  }
  auto endpoint = [](double d0, double d1) {
    double s = (3.0 * d0 - d1) / 2.0;
    if (sign(s) != sign(d0)) {
      s = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = endpoint(delta[0], delta[1]);
  d[n - 1] = endpoint(delta[n - 2], delta[n - 3]);
  // The right endpoint formula runs on mirrored data: slopes keep their sign.
  return d;
}

} // namespace

SpectrumInterpolant::SpectrumInterpolant(const GridSpectrum &s) : spectrum_(&s) {
  std::vector<double> re(s.values.size()), im(s.values.size());
  for (std::size_t k = 0; k < re.size(); ++k) {
    re[k] = s.values[k].real();
    im[k] = s.values[k].imag();
  }
  slope_re_ = monotone_slopes(re, s.grid.spacing());
  slope_im_ = monotone_slopes(im, s.grid.spacing());
}

std::complex<double> SpectrumInterpolant::operator()(double xi) const {
  const XiGrid &g = spectrum_->grid;
  const double L = g.half_width();
  const double tol = 1e-12 * L;
  if (xi < -L - tol || xi > L + tol) {
    std::ostringstream msg;
    msg << "spectral interpolation at xi=" << xi << " outside the grid [-" << L << ", " << L
        << "] (domain truncation)";
    throw SpectralDomainError(msg.str());
  }
  const double h = g.spacing();
  const double pos = (std::clamp(xi, -L, L) + L) / h;
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k >= g.intervals()) {
    k = g.intervals() - 1;
  }
  const double t = pos - static_cast<double>(k);
  if (t == 0.0) {
    return spectrum_->values[k];
  }
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const auto &v = spectrum_->values;
  const double re = h00 * v[k].real() + h10 * h * slope_re_[k] + h01 * v[k + 1].real() +
                    h11 * h * slope_re_[k + 1];
  const double im = h00 * v[k].imag() + h10 * h * slope_im_[k] + h01 * v[k + 1].imag() +
                    h11 * h * slope_im_[k + 1];
  return {re, im};
}

std::vector<std::complex<double>> bobylev_rhs(const GridSpectrum &spectrum,
                                              const BobylevParams &p) {
  const SpectrumInterpolant F(spectrum);
  const auto xs = spectrum.grid.nodes();
  const double plus_a = (3.0 - p.alpha) / 4.0;
  const double plus_b = (1.0 + p.alpha) / 4.0;
  std::vector<std::complex<double>> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double xi = xs[k];
    std::complex<double> gain{0.0, 0.0};
    // In 1-D, |xi| sigma = s xi with s = sigma . xi_hat in {+1, -1}.
    for (const auto &[s, weight] : {std::pair{1.0, p.b_plus}, std::pair{-1.0, p.b_minus}}) {
      if (weight == 0.0) {
        continue;
      }
      const double xi_plus = plus_a * xi + plus_b * s * xi;
      const double xi_minus = plus_b * (xi - s * xi);
      gain += weight * F(xi_plus) * F(xi_minus);
    }
    std::complex<double> rhs = gain - spectrum.values[k];
    if (p.with_diffusion) {
      rhs -= p.nu * xi * xi * spectrum.values[k];
    }
    out[k] = rhs;
  }
  return out;
}

double spectral_stability_bound(const XiGrid &grid, const BobylevParams &p) {
  const double L = grid.half_width();
  const double stiff = 3.0 + (p.with_diffusion ? p.nu * L * L : 0.0);
  return 2.78 / stiff;
}

void SpectralInvariants::observe(const GridSpectrum &s) {
  const std::size_t n = s.values.size();
  const std::size_t c = s.grid.center();
  max_mass_error = std::max(max_mass_error, std::abs(s.values[c] - 1.0));
  for (std::size_t k = 0; k < n; ++k) {
    max_modulus = std::max(max_modulus, std::abs(s.values[k]));
    max_hermitian_error =
        std::max(max_hermitian_error, std::abs(s.values[n - 1 - k] - std::conj(s.values[k])));
  }
  max_boundary_modulus =
      std::max({max_boundary_modulus, std::abs(s.values.front()), std::abs(s.values.back())});
  ++checks;
}

GridSpectrum spectral_evolve(const GridSpectrum &initial, const BobylevParams &params,
                             double t_end, double dt, SpectralInvariants *invariants,
                             const std::function<void(double, const GridSpectrum &)> &observer) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw std::invalid_argument("spectral_evolve: alpha must lie in (0, 1]");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("spectral_evolve: dt must be positive");
  }
  const double bound = spectral_stability_bound(initial.grid, params);
  if (dt > bound) {
    std::ostringstream msg;
    msg << "spectral_evolve: dt=" << dt << " exceeds the RK4 stability bound " << bound;
    throw std::invalid_argument(msg.str());
  }
  GridSpectrum y = initial;
  if (invariants) {
    invariants->observe(y);
  }
  const std::size_t n = y.values.size();
  GridSpectrum tmp = y;
  double t = 0.0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  for (std::size_t step = 0; step < steps; ++step) {
    const double h = std::min(dt, t_end - t);
    const auto k1 = bobylev_rhs(y, params);
    for (std::size_t k = 0; k < n; ++k) tmp.values[k] = y.values[k] + 0.5 * h * k1[k];
    const auto k2 = bobylev_rhs(tmp, params);
    for (std::size_t k = 0; k < n; ++k) tmp.values[k] = y.values[k] + 0.5 * h * k2[k];
    const auto k3 = bobylev_rhs(tmp, params);
    for (std::size_t k = 0; k < n; ++k) tmp.values[k] = y.values[k] + h * k3[k];
    const auto k4 = bobylev_rhs(tmp, params);
    for (std::size_t k = 0; k < n; ++k) {
      y.values[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    t = step + 1 == steps ? t_end : t + h;
    for (std::size_t k = 0; k < n; ++k) {
      const double mod = std::abs(y.values[k]);
      if (!(mod <= 1.0 + 1e-6)) {
        std::ostringstream msg;
        msg << "spectral_evolve: |F| = " << mod << " at xi=" << y.grid.node(k) << ", t=" << t
            << " (instability)";
        throw SpectralInstabilityError(msg.str());
      }
    }
    if (invariants) {
      invariants->observe(y);
    }
    if (observer) {
      observer(t, y);
    }
  }
  return y;
}

double spectral_second_moment(const GridSpectrum &s) {
  const std::size_t c = s.grid.center();
  if (c < 2) {
    throw std::invalid_argument("spectral_second_moment: grid too coarse");
  }
  const double h = s.grid.spacing();
  const auto &v = s.values;
  const double f2 = (-v[c + 2].real() + 16.0 * v[c + 1].real() - 30.0 * v[c].real() +
                     16.0 * v[c - 1].real() - v[c - 2].real()) /
                    (12.0 * h * h);
  return -f2;
}

} // namespace mfchaos
