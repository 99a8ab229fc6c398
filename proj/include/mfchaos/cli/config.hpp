#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfchaos::cli {

/// Schema violation; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` experiment file. `#` starts a comment, lists are
/// comma-separated, keys are [a-z0-9_.]+ and may appear once.
///
/// Typed getters fill in the documented default when a key is absent and
/// record the resolved value, so the full configuration can be echoed into
/// output headers and parsed back unchanged.
class Config {
public:
  Config() = default;
  static Config parse(const std::string &text, const std::string &origin = "<config>");
  static Config load(const std::string &path);

  bool has(const std::string &key) const { return raw_.count(key) != 0; }
  void set(const std::string &key, const std::string &value);

  std::string get_string(const std::string &key, const std::string &fallback);
  std::string get_choice(const std::string &key, const std::string &fallback,
                         const std::vector<std::string> &choices);
  double get_real(const std::string &key, double fallback);
  std::uint64_t get_uint(const std::string &key, std::uint64_t fallback);
  bool get_bool(const std::string &key, bool fallback);
  std::vector<double> get_reals(const std::string &key, const std::vector<double> &fallback);
  std::vector<std::uint64_t> get_uints(const std::string &key,
                                       const std::vector<std::uint64_t> &fallback);
  std::vector<std::string> get_strings(const std::string &key,
                                       const std::vector<std::string> &fallback);

  /// Resolved values in key order.
  const std::map<std::string, std::string> &resolved() const { return resolved_; }

  /// Throws ConfigError listing keys that were never read.
  void reject_unknown() const;

private:
  [[noreturn]] void fail(const std::string &key, const std::string &what) const;

  std::map<std::string, std::string> raw_;
  std::map<std::string, int> line_;
  std::string origin_;
  std::map<std::string, std::string> resolved_;
  std::set<std::string> read_;
};

/// Lossless decimal form of a double (17 significant digits).
std::string format_real(double x);

} // namespace mfchaos::cli
