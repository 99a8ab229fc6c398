#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfchaos/chaos_harness.hpp"
#include "mfchaos/cli/config.hpp"
#include "mfchaos/cli/csv.hpp"
#include "mfchaos/models.hpp"

namespace mfchaos::cli {

inline constexpr const char *kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed; // overrides the config's seed
  std::size_t workers = 1;           // never affects output bytes
};

struct RunResult {
  int exit_code = 0;
  std::string csv;
  std::vector<std::string> warnings;
};

const std::vector<std::string> &subcommands();

/// Runs one subcommand (simulate, metric, chaos-curve, omega-n, check) on a
/// parsed configuration and returns the CSV document. Throws ConfigError on
/// schema violations; simulator and metric errors propagate.
RunResult run(const std::string &subcommand, Config config, const RunOptions &options);

/// Model, initial law and time grid shared by the model-driven commands.
struct ModelSetup {
  ModelConfig model;
  InitialLaw init;
  double t_end = 1.0;
  std::vector<double> times;
};

/// Reads model, initial-law and time keys with their defaults.
ModelSetup resolve_model(Config &config);

/// Header lines common to every command.
void write_header(CsvWriter &csv, const std::string &subcommand, const Config &config);

} // namespace mfchaos::cli
