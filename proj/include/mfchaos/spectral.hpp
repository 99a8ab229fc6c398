#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mfchaos/angular_kernel.hpp"
#include "mfchaos/core.hpp"

namespace mfchaos {

/// Uniform frequency grid on [-L, L] with an even number of intervals, so
/// that xi = 0 is always a node (index `center()`).
class XiGrid {
public:
  XiGrid(double half_width, std::size_t intervals);

  double half_width() const { return half_width_; }
  std::size_t intervals() const { return intervals_; }
  std::size_t size() const { return intervals_ + 1; }
  std::size_t center() const { return intervals_ / 2; }
  double spacing() const { return spacing_; }
  double node(std::size_t k) const {
    return -half_width_ + spacing_ * static_cast<double>(k);
  }
  std::vector<double> nodes() const;

  friend bool operator==(const XiGrid &a, const XiGrid &b) {
    return a.half_width_ == b.half_width_ && a.intervals_ == b.intervals_;
  }

private:
  double half_width_;
  std::size_t intervals_;
  double spacing_;
};

/// Characteristic function F(xi) = integral exp(-i xi v) f(dv) sampled on a grid (d = 1).
struct GridSpectrum {
  XiGrid grid;
  std::vector<std::complex<double>> values;

  GridSpectrum(XiGrid g, std::vector<std::complex<double>> v);
};

GridSpectrum gaussian_spectrum(const XiGrid &grid, double mean, double variance);

/// F(xi) = (1/N) sum_j exp(-i xi z_j), exact at every node. 1-D atoms only.
GridSpectrum char_from_empirical(const EmpiricalMeasure &mu, const XiGrid &grid);

class SpectralDomainError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

class SpectralInstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the 1-D diffusive inelastic Maxwell equation in Fourier
/// variables. `b_plus` is the kernel weight at sigma . xi_hat = +1.
struct BobylevParams {
  double alpha = 0.8;
  double b_plus = 0.5;
  double b_minus = 0.5;
  bool with_diffusion = true;
  double nu = 1.0;

  static BobylevParams from_kernel(const AngularKernel &kernel, double alpha,
                                   bool with_diffusion, double nu = 1.0);
};

/// Monotone piecewise-cubic Hermite interpolant (Hyman-filtered centered slopes)
/// of the real and imaginary parts of a spectrum.
class SpectrumInterpolant {
public:
  explicit SpectrumInterpolant(const GridSpectrum &s);
  /// Throws SpectralDomainError outside [-L, L].
  std::complex<double> operator()(double xi) const;

private:
  const GridSpectrum *spectrum_;
  std::vector<double> slope_re_;
  std::vector<double> slope_im_;
};

/// dF/dt = Qhat+(F, F) - F - nu |xi|^2 F [with diffusion], with
///   Qhat+(F, F)(xi) = sum over sigma in {+xi_hat, -xi_hat} of b(sigma . xi_hat) F(xi+) F(xi-),
///   xi+ = ((3 - alpha)/4) xi + ((1 + alpha)/4) |xi| sigma,
///   xi- = ((1 + alpha)/4) (xi - |xi| sigma).
std::vector<std::complex<double>> bobylev_rhs(const GridSpectrum &spectrum,
                                              const BobylevParams &params);

/// Largest dt accepted by spectral_evolve on this grid.
double spectral_stability_bound(const XiGrid &grid, const BobylevParams &params);

/// Worst invariant violations seen over a run.
struct SpectralInvariants {
  double max_mass_error = 0.0;      // |F(0) - 1|
  double max_hermitian_error = 0.0; // max |F(-xi) - conj F(xi)|
  double max_modulus = 0.0;         // max |F|
  double max_boundary_modulus = 0.0; // |F| at xi = -L and xi = L (truncation check)
  std::size_t checks = 0;

  void observe(const GridSpectrum &s);
  bool holds(double tol = 1e-8) const {
    return max_mass_error <= tol && max_hermitian_error <= tol && max_modulus <= 1.0 + tol;
  }
};

/// Classical RK4 to t_end in steps of dt (the last step is shortened to land
/// on t_end). Invariants are checked after every step; |F| > 1 + 1e-6 at any
/// node aborts with SpectralInstabilityError. `observer` sees (t, spectrum)
/// after each step.
GridSpectrum spectral_evolve(const GridSpectrum &initial, const BobylevParams &params,
                             double t_end, double dt, SpectralInvariants *invariants = nullptr,
                             const std::function<void(double, const GridSpectrum &)> &observer = {});

/// -F''(0) from a five-point stencil: the second moment of the measure.
double spectral_second_moment(const GridSpectrum &s);

} // namespace mfchaos
