#pragma once

#include <charconv>
#include <istream>
#include <string>
#include <vector>

#include "zealotry/errors.hpp"

namespace zealotry {

/// Comma-separated reader with a header row. Handles double-quoted fields
/// (embedded commas and "" escapes) but not newlines inside quotes. Blank lines
/// and lines starting with '#' are skipped.
class CsvReader {
 public:
  CsvReader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      if (!blank(line)) {
        header_ = split(line);
        return;
      }
    }
    throw ParseError(source_, line_, "missing header row");
  }

  bool has_column(const std::string& name) const { return find(name) != npos; }

  std::size_t column(const std::string& name) const {
    const std::size_t k = find(name);
    if (k == npos) throw InputError(source_ + ": missing column '" + name + "'");
    return k;
  }

  /// Next data row; false at end of input. Rows shorter than the header are rejected.
  bool next(std::vector<std::string>& row) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      if (blank(line)) continue;
      row = split(line);
      if (row.size() < header_.size()) {
        throw ParseError(source_, line_, "expected " + std::to_string(header_.size()) + " fields, found " +
                                             std::to_string(row.size()));
      }
      return true;
    }
    return false;
  }

  long integer(const std::vector<std::string>& row, std::size_t col) const {
    const std::string& s = row[col];
    // Some exports write integral columns as "80.0".
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value != static_cast<double>(static_cast<long>(value))) {
      throw ParseError(source_, line_, "column '" + header_[col] + "': expected an integer, found '" + s + "'");
    }
    return static_cast<long>(value);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t find(const std::string& name) const {
    for (std::size_t k = 0; k < header_.size(); ++k) {
      if (header_[k] == name) return k;
    }
    return npos;
  }

  static bool blank(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
  }

  std::vector<std::string> split(const std::string& line) const {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char c = line[k];
      if (quoted) {
        if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
          field += '"';
          ++k;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        out.push_back(std::move(field));
        field.clear();
      } else if (c != '\r') {
        field += c;
      }
    }
    if (quoted) throw ParseError(source_, line_, "unterminated quoted field");
    out.push_back(std::move(field));
    return out;
  }

  std::istream& is_;
  std::string source_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
};

}  // namespace zealotry
