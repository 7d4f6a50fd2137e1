#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>
#include <vector>

#include "flawnet/error.hpp"

namespace flawnet {

/// Splits one CSV line into fields. Supports double-quoted fields with
/// doubled inner quotes; embedded newlines are not supported.
inline std::vector<std::string> parse_csv_line(const std::string& line, std::size_t line_no = 0) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

/// Quotes a field only when it contains a comma, quote or leading quote.
inline std::string csv_escape(const std::string& field) {
  if (field.find(',') == std::string::npos && field.find('"') == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

/// Shortest decimal representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericError("format_double failed");
  return std::string(buf, ptr);
}

/// Parses a full numeric cell; rejects trailing garbage and empty cells.
inline double parse_double_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw DataError("line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
  return v;
}

}  // namespace flawnet
