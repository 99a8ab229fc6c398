#include "mfchaos/cli/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mfchaos::cli {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string &k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> items;
  if (trim(s).empty()) return items;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    items.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

bool parse_real(const std::string &s, double &out) {
  if (s.empty()) return false;
  errno = 0;
  char *end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_uint(const std::string &s, std::uint64_t &out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit)) return false;
  errno = 0;
  char *end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

template <typename T, typename F>
std::string join(const std::vector<T> &v, F fmt) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += fmt(v[k]);
  }
  return s;
}

} // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Config Config::parse(const std::string &text, const std::string &origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(where + ": invalid key '" + key + "'");
    }
    if (c.raw_.count(key)) {
      throw ConfigError(where + ": key '" + key + "' given twice");
    }
    c.raw_[key] = value;
    c.line_[key] = lineno;
  }
  return c;
}

Config Config::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string &key, const std::string &value) {
  if (!valid_key(key)) {
    throw ConfigError("invalid key '" + key + "'");
  }
  raw_[key] = value;
  line_.erase(key);
}

void Config::fail(const std::string &key, const std::string &what) const {
  std::string where = origin_.empty() ? "<config>" : origin_;
  const auto it = line_.find(key);
  if (it != line_.end()) where += ":" + std::to_string(it->second);
  throw ConfigError(where + ": key '" + key + "': " + what);
}

std::string Config::get_string(const std::string &key, const std::string &fallback) {
  read_.insert(key);
  const auto it = raw_.find(key);
  const std::string v = it == raw_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

std::string Config::get_choice(const std::string &key, const std::string &fallback,
                               const std::vector<std::string> &choices) {
  const std::string v = get_string(key, fallback);
  if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
    fail(key, "expected one of {" + join(choices, [](const std::string &s) { return s; }) +
                  "}, got '" + v + "'");
  }
  return v;
}

double Config::get_real(const std::string &key, double fallback) {
  read_.insert(key);
  double v = fallback;
  const auto it = raw_.find(key);
  if (it != raw_.end() && !parse_real(it->second, v)) {
    fail(key, "expected a real number, got '" + it->second + "'");
  }
  resolved_[key] = format_real(v);
  return v;
}

std::uint64_t Config::get_uint(const std::string &key, std::uint64_t fallback) {
  read_.insert(key);
  std::uint64_t v = fallback;
  const auto it = raw_.find(key);
  if (it != raw_.end() && !parse_uint(it->second, v)) {
    fail(key, "expected a nonnegative integer, got '" + it->second + "'");
  }
  resolved_[key] = std::to_string(v);
  return v;
}

bool Config::get_bool(const std::string &key, bool fallback) {
  const std::string v = get_choice(key, fallback ? "true" : "false", {"true", "false"});
  return v == "true";
}

std::vector<double> Config::get_reals(const std::string &key,
                                      const std::vector<double> &fallback) {
  read_.insert(key);
  std::vector<double> out = fallback;
  const auto it = raw_.find(key);
  if (it != raw_.end()) {
    out.clear();
    for (const auto &item : split_list(it->second)) {
      double x;
      if (!parse_real(item, x)) {
        fail(key, "expected a comma-separated list of reals, got '" + item + "'");
      }
      out.push_back(x);
    }
  }
  resolved_[key] = join(out, format_real);
  return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string &key,
                                             const std::vector<std::uint64_t> &fallback) {
  read_.insert(key);
  std::vector<std::uint64_t> out = fallback;
  const auto it = raw_.find(key);
  if (it != raw_.end()) {
    out.clear();
    for (const auto &item : split_list(it->second)) {
      std::uint64_t x;
      if (!parse_uint(item, x)) {
        fail(key, "expected a comma-separated list of nonnegative integers, got '" + item + "'");
      }
      out.push_back(x);
    }
  }
  resolved_[key] = join(out, [](std::uint64_t x) { return std::to_string(x); });
  return out;
}

std::vector<std::string> Config::get_strings(const std::string &key,
                                             const std::vector<std::string> &fallback) {
  read_.insert(key);
  std::vector<std::string> out = fallback;
  const auto it = raw_.find(key);
  if (it != raw_.end()) out = split_list(it->second);
  resolved_[key] = join(out, [](const std::string &s) { return s; });
  return out;
}

void Config::reject_unknown() const {
  std::string unknown;
  for (const auto &[k, v] : raw_) {
    if (!read_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) {
    throw ConfigError((origin_.empty() ? std::string("<config>") : origin_) +
                      ": unknown or unused keys: " + unknown);
  }
}

} // namespace mfchaos::cli
