#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/angular_kernel.hpp"
#include "mfchaos/core.hpp"
#include "mfchaos/inelastic_thermostat.hpp"
#include "mfchaos/kac_elastic.hpp"
#include "mfchaos/mckean_vlasov.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos {

/// Initial law of one particle.
///   gaussian  N(mean, diag(variances)), i.i.d. draws
///   uniform   independent uniform coordinates with the given means and
///             variances (half width sqrt(3 variance)), i.i.d. draws
///   quantile  deterministic: coordinate 0 on the quantiles
///             mean_0 + sqrt(var_0) Phi^{-1}((j - 1/2)/N), other coordinates
///             fixed at their means (e.g. a cold Vlasov start)
///   file      fixed particle positions read from a file; N must match
struct InitialLaw {
  enum class Kind { Gaussian, Uniform, Quantile, File };

  Kind kind = Kind::Gaussian;
  std::vector<double> mean{0.0};
  std::vector<double> variances{1.0};
  ParticleState fixed; // Kind::File

  static InitialLaw gaussian(std::vector<double> mean, std::vector<double> variances);
  static InitialLaw uniform(std::vector<double> mean, std::vector<double> variances);
  static InitialLaw quantile(std::vector<double> mean, std::vector<double> variances);
  static InitialLaw from_state(ParticleState state);

  std::size_t dim() const;
  bool deterministic() const { return kind == Kind::Quantile || kind == Kind::File; }
  ParticleState sample(std::size_t n, RngStream &rng) const;
  void validate() const;
};

const char *to_string(InitialLaw::Kind k);
InitialLaw::Kind initial_kind_from_name(const std::string &name);

/// Reads one particle per line, whitespace-separated coordinates; blank lines
/// and lines starting with '#' are skipped.
ParticleState read_state_file(const std::string &path);

enum class ModelKind { KacElastic, McKeanVlasov, Vlasov, InelasticThermostat };
const char *to_string(ModelKind k);
ModelKind model_kind_from_name(const std::string &name);

/// Everything needed to run one of the four particle systems.
struct ModelConfig {
  ModelKind kind = ModelKind::KacElastic;
  std::size_t dim = 3; // velocity dimension, MKV state dimension, or Vlasov space dimension
  AngularKernel kernel = AngularKernel::isotropic(3);
  PairConvention convention = PairConvention::Unordered;
  RestitutionParams restitution;
  DriftDiffusionSpec drift_diffusion;
  VlasovSpec vlasov;
  double dt = 1e-2; // McKean-Vlasov and Vlasov only

  /// Dimension of one particle's state (2 * dim for Vlasov).
  std::size_t state_dim() const { return kind == ModelKind::Vlasov ? 2 * dim : dim; }
  bool stochastic_dynamics() const { return kind != ModelKind::Vlasov; }
  void validate() const;
};

/// Runs the model from `initial` and returns snapshots at the given times.
/// `rng` drives the dynamics only (unused for Vlasov).
std::vector<ParticleState> run_model(const ModelConfig &model, const ParticleState &initial,
                                     double t_end, std::span<const double> snapshot_times,
                                     RngStream &rng);

} // namespace mfchaos
