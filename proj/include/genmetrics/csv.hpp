// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "genmetrics/error.hpp"

namespace genmetrics {

// A parsed comma-separated file. Fields may be double-quoted (RFC 4180);
// `lines[i]` is the 1-based source line on which row i starts.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  std::optional<std::size_t> FindColumn(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t RequireColumn(std::string_view name) const {
    if (auto index = FindColumn(name)) return *index;
    throw Error(ErrorCode::kMissingColumn, std::string(name), source + ":1");
  }

  std::string Where(std::size_t row) const {
    return source + ":" + std::to_string(lines[row]);
  }
};

inline CsvTable ParseCsv(std::string_view text, std::string source) {
  CsvTable table;
  table.source = std::move(source);
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }

  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool have_header = false;

  auto finish_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (!have_header) {
        table.header = std::move(record);
        have_header = true;
      } else {
        if (record.size() != table.header.size()) {
          throw Error(ErrorCode::kBadValue,
                      "expected " + std::to_string(table.header.size()) +
                          " fields, found " + std::to_string(record.size()),
                      table.source + ":" + std::to_string(record_line));
        }
        table.rows.push_back(std::move(record));
        table.lines.push_back(record_line);
      }
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw Error(ErrorCode::kBadValue, "stray quote inside field",
                      table.source + ":" + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kBadValue, "unterminated quoted field",
                table.source + ":" + std::to_string(record_line));
  }
  if (field_started || !record.empty()) finish_record();
  if (!have_header) {
    throw Error(ErrorCode::kEmptyInput, "no header line", table.source);
  }
  return table;
}

inline std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open file", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline CsvTable ReadCsv(const std::string& path) {
  return ParseCsv(ReadTextFile(path), path);
}

inline double ParseDouble(std::string_view text, const std::string& where) {
  // Leading '+' is not accepted by from_chars.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kBadValue,
                "not a number: '" + std::string(text) + "'", where);
  }
  return value;
}

inline std::int64_t ParseInt(std::string_view text, const std::string& where) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kBadValue,
                "not an integer: '" + std::string(text) + "'", where);
  }
  return value;
}

inline std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Shortest text that parses back to the same double.
inline std::string FormatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

inline std::string FormatFixed(double value, int decimals) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::fixed, decimals);
  return std::string(buffer, ptr);
}

}  // namespace genmetrics
