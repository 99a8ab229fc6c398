#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "mfchaos/cli/commands.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Propagation-of-chaos experiments for mean-field particle systems"};
  app.set_version_flag("--version", std::string(mfchaos::cli::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out = "-";
  for (const auto &name : mfchaos::cli::subcommands()) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file (key = value)");
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--workers", workers, "worker threads (output does not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output CSV path, '-' for stdout");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  const auto *sub = app.get_subcommands().front();
  try {
    mfchaos::cli::Config config;
    if (!config_path.empty()) {
      config = mfchaos::cli::Config::load(config_path);
    } else if (command != "check") {
      std::cerr << "error: --config is required for '" << command << "'\n";
      return 2;
    }
    mfchaos::cli::RunOptions options;
    if (sub->count("--seed") > 0) options.seed = seed;
    options.workers = workers;
    const auto result = mfchaos::cli::run(command, std::move(config), options);
    for (const auto &w : result.warnings) {
      std::cerr << "warning: " << w << '\n';
    }
    if (out.empty() || out == "-") {
      std::cout << result.csv;
    } else {
      mfchaos::cli::CsvWriter::write_file(out, result.csv);
    }
    return result.exit_code;
  } catch (const mfchaos::cli::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
