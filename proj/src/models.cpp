#include "mfchaos/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfchaos {

InitialLaw InitialLaw::gaussian(std::vector<double> mean, std::vector<double> variances) {
  InitialLaw law;
  law.kind = Kind::Gaussian;
  law.mean = std::move(mean);
  law.variances = std::move(variances);
  law.validate();
  return law;
}

InitialLaw InitialLaw::uniform(std::vector<double> mean, std::vector<double> variances) {
  InitialLaw law = gaussian(std::move(mean), std::move(variances));
  law.kind = Kind::Uniform;
  return law;
}

InitialLaw InitialLaw::quantile(std::vector<double> mean, std::vector<double> variances) {
  InitialLaw law = gaussian(std::move(mean), std::move(variances));
  law.kind = Kind::Quantile;
  return law;
}

InitialLaw InitialLaw::from_state(ParticleState state) {
  InitialLaw law;
  law.kind = Kind::File;
  law.mean.clear();
  law.variances.clear();
  law.fixed = std::move(state);
  law.validate();
  return law;
}

std::size_t InitialLaw::dim() const { return kind == Kind::File ? fixed.dim() : mean.size(); }

void InitialLaw::validate() const {
  if (kind == Kind::File) {
    if (fixed.size() == 0 || fixed.dim() == 0) {
      throw std::invalid_argument("initial law: empty particle file");
    }
    return;
  }
  if (mean.empty() || mean.size() != variances.size()) {
    throw std::invalid_argument("initial law: mean and variances must have equal nonzero length");
  }
  for (double v : variances) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("initial law: variances must be finite and nonnegative");
    }
  }
}

ParticleState InitialLaw::sample(std::size_t n, RngStream &rng) const {
  switch (kind) {
  case Kind::Gaussian:
    return gaussian_sample_state(mean, variances, n, rng);
  case Kind::Uniform: {
    const std::size_t d = mean.size();
    ParticleState s(d, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto z = s.particle(i);
      for (std::size_t k = 0; k < d; ++k) {
        const double half = std::sqrt(3.0 * variances[k]);
        z[k] = mean[k] + half * (2.0 * rng.uniform() - 1.0);
      }
    }
    return s;
  }
  case Kind::Quantile: {
    const std::size_t d = mean.size();
    const double sd = std::sqrt(variances[0]);
    const double m0 = mean[0];
    const auto line =
        quantile_init_1d([&](double p) { return m0 + sd * normal_quantile(p); }, n);
    ParticleState s(d, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto z = s.particle(i);
      z[0] = line.particle(i)[0];
      for (std::size_t k = 1; k < d; ++k) z[k] = mean[k];
    }
    return s;
  }
  case Kind::File:
    if (n != fixed.size()) {
      throw std::invalid_argument("initial law: particle file holds " +
                                  std::to_string(fixed.size()) + " particles, N=" +
                                  std::to_string(n) + " requested");
    }
    return fixed;
  }
  throw std::logic_error("initial law: unknown kind");
}

const char *to_string(InitialLaw::Kind k) {
  switch (k) {
  case InitialLaw::Kind::Gaussian: return "gaussian";
  case InitialLaw::Kind::Uniform: return "uniform";
  case InitialLaw::Kind::Quantile: return "quantile";
  case InitialLaw::Kind::File: return "file";
  }
  return "?";
}

InitialLaw::Kind initial_kind_from_name(const std::string &name) {
  for (auto k : {InitialLaw::Kind::Gaussian, InitialLaw::Kind::Uniform,
                 InitialLaw::Kind::Quantile, InitialLaw::Kind::File}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown initial law '" + name + "'");
}

ParticleState read_state_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open particle file '" + path + "'");
  }
  std::vector<double> coords;
  std::size_t dim = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::size_t count = 0;
    double x;
    while (ss >> x) {
      coords.push_back(x);
      ++count;
    }
    if (!ss.eof()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number");
    }
    if (dim == 0) {
      dim = count;
    } else if (count != dim) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": inconsistent coordinate count");
    }
  }
  if (dim == 0) {
    throw std::runtime_error("particle file '" + path + "' is empty");
  }
  return ParticleState(dim, std::move(coords));
}

const char *to_string(ModelKind k) {
  switch (k) {
  case ModelKind::KacElastic: return "kac_elastic";
  case ModelKind::McKeanVlasov: return "mckean_vlasov";
  case ModelKind::Vlasov: return "vlasov";
  case ModelKind::InelasticThermostat: return "inelastic_thermostat";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string &name) {
  for (auto k : {ModelKind::KacElastic, ModelKind::McKeanVlasov, ModelKind::Vlasov,
                 ModelKind::InelasticThermostat}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown model '" + name + "'");
}

void ModelConfig::validate() const {
  if (dim == 0) {
    throw std::invalid_argument("model: dimension must be positive");
  }
  switch (kind) {
  case ModelKind::KacElastic:
    if (kernel.dim() != dim) throw std::invalid_argument("model: kernel dimension mismatch");
    break;
  case ModelKind::InelasticThermostat:
    if (kernel.dim() != dim) throw std::invalid_argument("model: kernel dimension mismatch");
    restitution.validate();
    if (restitution.dim != dim) throw std::invalid_argument("model: restitution dim mismatch");
    break;
  case ModelKind::McKeanVlasov:
    drift_diffusion.validate();
    if (drift_diffusion.dim != dim) throw std::invalid_argument("model: drift dim mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("model: dt must be positive");
    break;
  case ModelKind::Vlasov:
    if (vlasov.space_dim != dim) throw std::invalid_argument("model: Vlasov dim mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("model: dt must be positive");
    break;
  }
}

std::vector<ParticleState> run_model(const ModelConfig &model, const ParticleState &initial,
                                     double t_end, std::span<const double> snapshot_times,
                                     RngStream &rng) {
  if (initial.dim() != model.state_dim()) {
    throw std::invalid_argument("run_model: initial state dimension does not match the model");
  }
  switch (model.kind) {
  case ModelKind::KacElastic:
    return simulate_kac(initial, model.kernel, t_end, snapshot_times, rng, model.convention);
  case ModelKind::InelasticThermostat:
    return simulate_thermostat(initial, model.kernel, model.restitution, t_end, snapshot_times,
                               rng, model.convention);
  case ModelKind::McKeanVlasov:
    return simulate_mkv(initial, model.drift_diffusion, t_end, model.dt, snapshot_times, rng);
  case ModelKind::Vlasov:
    return simulate_vlasov(initial, model.vlasov, t_end, model.dt, snapshot_times);
  }
  throw std::logic_error("run_model: unknown model");
}

} // namespace mfchaos
