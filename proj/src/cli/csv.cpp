#include "mfchaos/cli/csv.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

#include "mfchaos/cli/config.hpp"

namespace mfchaos::cli {

namespace {

std::string cell_text(const CsvWriter::Cell &c) {
  struct Visitor {
    std::string operator()(double x) const { return format_real(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string &s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

void check_single_line(const std::string &s) {
  if (s.find('\n') != std::string::npos) {
    throw std::invalid_argument("csv metadata must fit on one line");
  }
}

} // namespace

void CsvWriter::meta(const std::string &key, const std::string &value) {
  check_single_line(key + value);
  head_ << '#' << key << '=' << value << '\n';
}

void CsvWriter::meta(const std::string &key, double value) { meta(key, format_real(value)); }

void CsvWriter::meta(const std::string &key, std::uint64_t value) {
  meta(key, std::to_string(value));
}

void CsvWriter::columns(const std::vector<std::string> &names) {
  if (width_ != 0) {
    throw std::logic_error("csv columns already set");
  }
  width_ = names.size();
  for (std::size_t k = 0; k < names.size(); ++k) {
    body_ << (k ? "," : "") << names[k];
  }
  body_ << '\n';
}

void CsvWriter::row(const std::vector<Cell> &cells) {
  if (cells.size() != width_) {
    throw std::logic_error("csv row width differs from the header");
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    body_ << (k ? "," : "") << cell_text(cells[k]);
  }
  body_ << '\n';
}

void CsvWriter::footer(const std::string &key, const std::string &value) {
  check_single_line(key + value);
  foot_ << '#' << key << '=' << value << '\n';
}

void CsvWriter::footer(const std::string &key, double value) { footer(key, format_real(value)); }

std::string CsvWriter::str() const { return head_.str() + body_.str() + foot_.str(); }

void CsvWriter::save(const std::string &path) const {
  if (path.empty() || path == "-") {
    std::cout << str();
    return;
  }
  write_file(path, str());
}

void CsvWriter::write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

} // namespace mfchaos::cli
