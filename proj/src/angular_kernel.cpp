#include "mfchaos/angular_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mfchaos/core.hpp"

namespace mfchaos {

namespace {

constexpr std::size_t kSimpsonIntervals = 1u << 14;
constexpr std::size_t kTableSubintervals = 8;

double simpson(const std::function<double(double)> &f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k) {
    s += (k % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  }
  return s * h / 3.0;
}

double sin_power(double theta, std::size_t dim) {
  return dim == 2 ? 1.0 : std::pow(std::sin(theta), static_cast<double>(dim - 2));
}

} // namespace

double sphere_area(std::size_t k) {
  const double n = static_cast<double>(k + 1);
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

AngularKernel AngularKernel::isotropic(std::size_t dim) {
  if (dim == 1) {
    AngularKernel k = two_point(0.5, 0.5);
    k.name_ = "isotropic";
    return k;
  }
  AngularKernel k = from_density(dim, [](double) { return 1.0; }, "isotropic");
  k.kind_ = Kind::Isotropic;
  k.mean_cosine_ = 0.0;
  return k;
}

AngularKernel AngularKernel::from_density(std::size_t dim, std::function<double(double)> shape,
                                          std::string name) {
  if (dim < 2) {
    throw std::invalid_argument("AngularKernel: tabulated kernels need dim >= 2");
  }
  AngularKernel k;
  k.kind_ = Kind::Tabulated;
  k.dim_ = dim;
  k.name_ = std::move(name);
  k.shape_ = std::move(shape);
  for (std::size_t i = 0; i <= 64; ++i) {
    const double c = -1.0 + 2.0 * static_cast<double>(i) / 64.0;
    if (!(k.shape_(c) >= 0.0)) {
      throw std::invalid_argument("AngularKernel: density must be nonnegative on [-1, 1]");
    }
  }
  const double raw = k.theta_integral([&k](double th) { return k.shape_(std::cos(th)); });
  if (!(raw > 0.0) || !std::isfinite(raw)) {
    throw std::invalid_argument("AngularKernel: density has zero or infinite mass");
  }
  k.scale_ = 1.0 / raw;
  k.mean_cosine_ = k.theta_integral(
      [&k](double th) { return std::cos(th) * k.scale_ * k.shape_(std::cos(th)); });
  k.build_table();
  return k;
}

AngularKernel AngularKernel::two_point(double b_plus, double b_minus) {
  if (!(b_plus >= 0.0) || !(b_minus >= 0.0) || !(b_plus + b_minus > 0.0)) {
    throw std::invalid_argument("AngularKernel: two-point weights must be nonnegative");
  }
  AngularKernel k;
  k.kind_ = Kind::TwoPoint;
  k.dim_ = 1;
  k.name_ = "two_point";
  const double total = b_plus + b_minus;
  k.b_plus_ = b_plus / total;
  k.b_minus_ = b_minus / total;
  k.mean_cosine_ = k.b_plus_ - k.b_minus_;
  return k;
}

AngularKernel AngularKernel::from_name(const std::string &name, std::size_t dim, double param) {
  if (name == "isotropic") {
    return isotropic(dim);
  }
  if (dim == 1) {
    // S^0 has two points; the peaked kernels reduce to a weight split.
    if (name == "forward_peaked") {
      return two_point(1.0, std::exp(-2.0 * param));
    }
    if (name == "backward_peaked") {
      return two_point(std::exp(-2.0 * param), 1.0);
    }
    throw std::invalid_argument("AngularKernel: unknown 1-D kernel '" + name + "'");
  }
  if (name == "forward_peaked") {
    return from_density(
        dim, [param](double c) { return std::exp(param * (c - 1.0)); }, name);
  }
  if (name == "backward_peaked") {
    return from_density(
        dim, [param](double c) { return std::exp(-param * (c + 1.0)); }, name);
  }
  if (name == "grazing_spike") {
    if (!(param > 0.0)) {
      throw std::invalid_argument("AngularKernel: spike width must be positive");
    }
    return from_density(
        dim,
        [param](double c) {
          const double th = std::acos(std::clamp(c, -1.0, 1.0));
          const double x = th / param;
          return std::exp(-0.5 * x * x);
        },
        name);
  }
  throw std::invalid_argument("AngularKernel: unknown kernel '" + name + "'");
}

double AngularKernel::theta_integral(const std::function<double(double)> &g) const {
  const std::size_t d = dim_;
  return sphere_area(d - 2) *
         simpson([&](double th) { return g(th) * sin_power(th, d); }, 0.0, std::numbers::pi,
                 kSimpsonIntervals);
}

void AngularKernel::build_table() {
  theta_nodes_.resize(kTableNodes);
  cdf_.assign(kTableNodes, 0.0);
  const double h = std::numbers::pi / static_cast<double>(kTableNodes - 1);
  auto g = [this](double th) { return shape_(std::cos(th)) * sin_power(th, dim_); };
  theta_nodes_[0] = 0.0;
  for (std::size_t k = 1; k < kTableNodes; ++k) {
    theta_nodes_[k] = h * static_cast<double>(k);
    cdf_[k] = cdf_[k - 1] + simpson(g, theta_nodes_[k - 1], theta_nodes_[k], kTableSubintervals);
  }
  const double total = cdf_.back();
  for (double &c : cdf_) {
    c /= total;
  }
  cdf_.back() = 1.0;
}

double AngularKernel::density(double c) const {
  if (kind_ == Kind::TwoPoint) {
    if (c == 1.0) {
      return b_plus_;
    }
    if (c == -1.0) {
      return b_minus_;
    }
    return 0.0;
  }
  if (c < -1.0 || c > 1.0) {
    return 0.0;
  }
  return scale_ * shape_(c);
}

double AngularKernel::normalization_integral() const {
  if (kind_ == Kind::TwoPoint) {
    return b_plus_ + b_minus_;
  }
  return theta_integral([this](double th) { return density(std::cos(th)); });
}

double AngularKernel::sample_cos(RngStream &rng) const {
  const double u = rng.uniform();
  if (kind_ == Kind::TwoPoint) {
    return u < b_plus_ ? 1.0 : -1.0;
  }
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t k = static_cast<std::size_t>(std::distance(cdf_.begin(), it)) - 1;
  if (k + 1 >= kTableNodes) {
    return std::cos(theta_nodes_.back());
  }
  const double span = cdf_[k + 1] - cdf_[k];
  const double frac = span > 0.0 ? (u - cdf_[k]) / span : 0.0;
  const double th = theta_nodes_[k] + frac * (theta_nodes_[k + 1] - theta_nodes_[k]);
  return std::cos(th);
}

void sample_sigma(const AngularKernel &kernel, std::span<const double> u_hat, RngStream &rng,
                  std::span<double> sigma) {
  const std::size_t d = u_hat.size();
  if (d != kernel.dim() || sigma.size() != d) {
    throw std::invalid_argument("sample_sigma: dimension mismatch");
  }
  if (std::abs(std::sqrt(squared_norm(u_hat)) - 1.0) > 1e-6) {
    throw std::invalid_argument("sample_sigma: u_hat is not a unit vector");
  }
  if (kernel.kind() == AngularKernel::Kind::TwoPoint) {
    const double c = kernel.sample_cos(rng);
    sigma[0] = c * u_hat[0];
    return;
  }
  if (kernel.kind() == AngularKernel::Kind::Isotropic) {
    for (std::size_t k = 0; k < d; ++k) {
      sigma[k] = rng.normal();
    }
    const double n = std::sqrt(squared_norm(sigma));
    if (n == 0.0) {
      std::copy(u_hat.begin(), u_hat.end(), sigma.begin());
      return;
    }
    for (double &s : sigma) {
      s /= n;
    }
    return;
  }
  const double c = kernel.sample_cos(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  // Uniform direction orthogonal to u_hat: project a Gaussian vector.
  double dot = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    sigma[k] = rng.normal();
    dot += sigma[k] * u_hat[k];
  }
  for (std::size_t k = 0; k < d; ++k) {
    sigma[k] -= dot * u_hat[k];
  }
  const double n = std::sqrt(squared_norm(sigma));
  if (n == 0.0) {
    std::copy(u_hat.begin(), u_hat.end(), sigma.begin());
    return;
  }
  for (std::size_t k = 0; k < d; ++k) {
    sigma[k] = c * u_hat[k] + s * sigma[k] / n;
  }
  const double m = std::sqrt(squared_norm(sigma));
  for (double &x : sigma) {
    x /= m;
  }
}

std::vector<double> sample_sigma(const AngularKernel &kernel, std::span<const double> u_hat,
                                 RngStream &rng) {
  std::vector<double> sigma(u_hat.size());
  sample_sigma(kernel, u_hat, rng, sigma);
  return sigma;
}

} // namespace mfchaos
