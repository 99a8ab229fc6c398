#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/core.hpp"

namespace mfchaos {

/// One-particle test function from a fixed catalog of bounded Lipschitz
/// functions. Every entry has sup norm and Lipschitz constant at most 1.
///
///   one                  1
///   gauss_bump           exp(-|z|^2 / 2)
///   bump:c               exp(-z_c^2 / 2)
///   tanh:c               tanh(z_c)
///   cos:c                cos(z_c)
///   compressed_sq:c      z_c^2 / (1 + z_c^2)
///   clamp01:c            min(max(z_c, 0), 1)
///
/// `c` is a coordinate index (default 0 when omitted).
class Observable {
public:
  enum class Kind { One, GaussBump, Bump, Tanh, Cos, CompressedSquare, Clamp01 };

  Observable(Kind kind, std::size_t coordinate = 0);
  /// Parses "name" or "name:c".
  static Observable parse(const std::string &text);
  static std::vector<std::string> catalog();

  double operator()(std::span<const double> z) const;
  double sup_norm() const;
  double lipschitz() const;
  std::string name() const;
  Kind kind() const { return kind_; }
  std::size_t coordinate() const { return coordinate_; }
  /// Throws when the coordinate index exceeds the state dimension.
  void check_dim(std::size_t dim) const;

private:
  Kind kind_;
  std::size_t coordinate_;
};

/// phi_1 (x) ... (x) phi_ell.
class ObservableProduct {
public:
  explicit ObservableProduct(std::vector<Observable> factors);
  /// Parses factors joined by '*', e.g. "tanh:0*compressed_sq:1".
  static ObservableProduct parse(const std::string &text);

  std::size_t ell() const { return factors_.size(); }
  const std::vector<Observable> &factors() const { return factors_; }
  /// Product of factor sup norms.
  double sup_norm() const;
  std::string name() const;
  void check_dim(std::size_t dim) const;

  /// Concatenation phi (x) psi.
  ObservableProduct concat(const ObservableProduct &other) const;

private:
  std::vector<Observable> factors_;
};

/// R^ell[phi](mu) = prod_j <phi_j, mu>.
double poly_observable(const EmpiricalMeasure &mu, const ObservableProduct &obs);

/// prod_j phi_j(z_{idx_j}).
double tensor_value(const ParticleState &state, const ObservableProduct &obs,
                    std::span<const std::size_t> indices);

} // namespace mfchaos
