#include "mfchaos/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfchaos {

namespace {

struct CatalogEntry {
  const char *name;
  Observable::Kind kind;
  bool per_coordinate;
  double sup;
  double lipschitz;
};

// Lipschitz constants: |d/dr exp(-r^2/2)| peaks at r = 1 with exp(-1/2);
// d/dx x^2/(1+x^2) = 2x/(1+x^2)^2 peaks at x = 1/sqrt(3) with 3 sqrt(3)/8.
const CatalogEntry kCatalog[] = {
    {"one", Observable::Kind::One, false, 1.0, 0.0},
    {"gauss_bump", Observable::Kind::GaussBump, false, 1.0, 0.60653065971263342},
    {"bump", Observable::Kind::Bump, true, 1.0, 0.60653065971263342},
    {"tanh", Observable::Kind::Tanh, true, 1.0, 1.0},
    {"cos", Observable::Kind::Cos, true, 1.0, 1.0},
    {"compressed_sq", Observable::Kind::CompressedSquare, true, 1.0, 0.64951905283832898},
    {"clamp01", Observable::Kind::Clamp01, true, 1.0, 1.0},
};

const CatalogEntry &entry(Observable::Kind kind) {
  for (const auto &e : kCatalog) {
    if (e.kind == kind) return e;
  }
  throw std::logic_error("observable kind missing from catalog");
}

} // namespace

Observable::Observable(Kind kind, std::size_t coordinate) : kind_(kind), coordinate_(coordinate) {
  if (!entry(kind).per_coordinate) {
    coordinate_ = 0;
  }
}

Observable Observable::parse(const std::string &text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::size_t coordinate = 0;
  if (colon != std::string::npos) {
    const std::string idx = text.substr(colon + 1);
    if (idx.empty() || !std::all_of(idx.begin(), idx.end(), ::isdigit)) {
      throw std::invalid_argument("observable '" + text + "': bad coordinate index");
    }
    coordinate = std::stoul(idx);
  }
  for (const auto &e : kCatalog) {
    if (name == e.name) {
      if (!e.per_coordinate && colon != std::string::npos) {
        throw std::invalid_argument("observable '" + name + "' takes no coordinate");
      }
      return Observable(e.kind, coordinate);
    }
  }
  throw std::invalid_argument("unknown observable '" + name + "'");
}

std::vector<std::string> Observable::catalog() {
  std::vector<std::string> names;
  for (const auto &e : kCatalog) names.emplace_back(e.name);
  return names;
}

double Observable::operator()(std::span<const double> z) const {
  switch (kind_) {
  case Kind::One:
    return 1.0;
  case Kind::GaussBump: {
    double r2 = 0.0;
    for (double x : z) r2 += x * x;
    return std::exp(-0.5 * r2);
  }
  default:
    break;
  }
  const double x = z[coordinate_];
  switch (kind_) {
  case Kind::Bump:
    return std::exp(-0.5 * x * x);
  case Kind::Tanh:
    return std::tanh(x);
  case Kind::Cos:
    return std::cos(x);
  case Kind::CompressedSquare:
    return x * x / (1.0 + x * x);
  case Kind::Clamp01:
    return std::clamp(x, 0.0, 1.0);
  default:
    return 0.0;
  }
}

double Observable::sup_norm() const { return entry(kind_).sup; }
double Observable::lipschitz() const { return entry(kind_).lipschitz; }

std::string Observable::name() const {
  const auto &e = entry(kind_);
  return e.per_coordinate ? std::string(e.name) + ":" + std::to_string(coordinate_) : e.name;
}

void Observable::check_dim(std::size_t dim) const {
  if (entry(kind_).per_coordinate && coordinate_ >= dim) {
    throw std::invalid_argument("observable " + name() + " needs dimension > " +
                                std::to_string(coordinate_));
  }
}

ObservableProduct::ObservableProduct(std::vector<Observable> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw std::invalid_argument("ObservableProduct: need at least one factor");
  }
}

ObservableProduct ObservableProduct::parse(const std::string &text) {
  std::vector<Observable> factors;
  std::size_t start = 0;
  for (;;) {
    const auto star = text.find('*', start);
    factors.push_back(Observable::parse(text.substr(start, star - start)));
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return ObservableProduct(std::move(factors));
}

double ObservableProduct::sup_norm() const {
  double s = 1.0;
  for (const auto &f : factors_) s *= f.sup_norm();
  return s;
}

std::string ObservableProduct::name() const {
  std::string s;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (j) s += '*';
    s += factors_[j].name();
  }
  return s;
}

void ObservableProduct::check_dim(std::size_t dim) const {
  for (const auto &f : factors_) f.check_dim(dim);
}

ObservableProduct ObservableProduct::concat(const ObservableProduct &other) const {
  std::vector<Observable> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return ObservableProduct(std::move(all));
}

double poly_observable(const EmpiricalMeasure &mu, const ObservableProduct &obs) {
  double product = 1.0;
  for (const auto &phi : obs.factors()) {
    product *= mu.average([&](std::span<const double> z) { return phi(z); });
  }
  return product;
}

double tensor_value(const ParticleState &state, const ObservableProduct &obs,
                    std::span<const std::size_t> indices) {
  if (indices.size() != obs.ell()) {
    throw std::invalid_argument("tensor_value: index count differs from ell");
  }
  double product = 1.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    product *= obs.factors()[j](state.particle(indices[j]));
  }
  return product;
}

} // namespace mfchaos
