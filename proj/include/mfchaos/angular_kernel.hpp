#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/rng.hpp"

namespace mfchaos {

/// Collision kernel b(cos theta) on deviation angles, normalized so that
/// its integral over the unit sphere S^{d-1} equals one.
///
/// Three representations:
///  - isotropic (constant b), sampled exactly;
///  - tabulated (d >= 2): arbitrary nonnegative shape, sampled through an
///    inverse-CDF table over theta in [0, pi] with linear interpolation;
///  - two-point (d == 1): S^0 = {-1, +1}, b reduces to the weights
///    b_plus (sigma = u_hat) and b_minus (sigma = -u_hat).
///
/// cos theta is measured against u_hat = (v_i - v_j)/|v_i - v_j|, so
/// cos theta = 1 is the grazing (no-op) collision.
class AngularKernel {
public:
  enum class Kind { Isotropic, Tabulated, TwoPoint };

  static constexpr std::size_t kTableNodes = 4096;

  static AngularKernel isotropic(std::size_t dim);
  /// `shape` is any nonnegative function on [-1, 1]; it is rescaled to unit mass.
  static AngularKernel from_density(std::size_t dim, std::function<double(double)> shape,
                                    std::string name = "tabulated");
  static AngularKernel two_point(double b_plus, double b_minus);

  /// Catalog lookup: "isotropic", "forward_peaked", "backward_peaked",
  /// "grazing_spike". `param` is the concentration (peaked kernels) or the
  /// angular width in radians (spike); ignored for isotropic.
  static AngularKernel from_name(const std::string &name, std::size_t dim, double param = 1.0);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::string &name() const { return name_; }

  /// Normalized density b(c), c in [-1, 1]. For d == 1 returns the weight
  /// attached to c = +1 or c = -1 (other c give 0).
  double density(double cos_theta) const;

  /// Sphere integral of the normalized density under the module quadrature.
  double normalization_integral() const;

  /// b_1 = integral of (sigma . u_hat) b(sigma . u_hat) dsigma.
  double mean_cosine() const { return mean_cosine_; }

  double b_plus() const { return b_plus_; }
  double b_minus() const { return b_minus_; }

  /// Draw cos theta from its marginal law.
  double sample_cos(RngStream &rng) const;

private:
  AngularKernel() = default;
  void build_table();
  double theta_integral(const std::function<double(double)> &g) const;

  Kind kind_ = Kind::Isotropic;
  std::size_t dim_ = 3;
  std::string name_;
  std::function<double(double)> shape_;
  double scale_ = 1.0; // normalized density = scale_ * shape_
  double mean_cosine_ = 0.0;
  double b_plus_ = 0.5;
  double b_minus_ = 0.5;
  std::vector<double> theta_nodes_;
  std::vector<double> cdf_;
};

/// Surface measure of the unit sphere S^{k} in R^{k+1}.
double sphere_area(std::size_t k);

/// sigma on S^{d-1} with cos theta = sigma . u_hat drawn from the kernel and
/// uniform azimuth around u_hat. Throws if |u_hat| differs from 1 by more
/// than 1e-6. The number of draws consumed depends only on the kernel kind
/// and the dimension.
void sample_sigma(const AngularKernel &kernel, std::span<const double> u_hat,
                  RngStream &rng, std::span<double> sigma_out);

std::vector<double> sample_sigma(const AngularKernel &kernel, std::span<const double> u_hat,
                                 RngStream &rng);

} // namespace mfchaos
