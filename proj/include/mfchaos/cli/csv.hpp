#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace mfchaos::cli {

/// CSV document: `#key=value` header lines, one column-name row, data rows,
/// and optional `#key=value` footer lines. Reals use 17 significant digits.
class CsvWriter {
public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

  void meta(const std::string &key, const std::string &value);
  void meta(const std::string &key, double value);
  void meta(const std::string &key, std::uint64_t value);
  void columns(const std::vector<std::string> &names);
  void row(const std::vector<Cell> &cells);
  void footer(const std::string &key, const std::string &value);
  void footer(const std::string &key, double value);

  std::string str() const;
  /// Writes to `path`, or to stdout when path is empty or "-".
  void save(const std::string &path) const;
  static void write_file(const std::string &path, const std::string &text);

private:
  std::ostringstream head_;
  std::ostringstream body_;
  std::ostringstream foot_;
  std::size_t width_ = 0;
};

} // namespace mfchaos::cli
