// Copyright 2026 The revmatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVMATCH_CSV_H_
#define REVMATCH_CSV_H_

// Minimal RFC 4180 style CSV reading and writing plus the number
// formatting helpers shared by every file format in the project.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "revmatch/error.h"

namespace revmatch {

struct CsvRow {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line number where the row starts
};

// Splits one logical CSV record. Quoted fields may contain separators,
// doubled quotes and newlines; `next_line` pulls continuation lines.
template <typename NextLine>
bool ParseCsvRecord(std::string line, char sep, NextLine&& next_line,
                    std::vector<std::string>* out) {
  out->clear();
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t pos = 0;
  while (true) {
    if (pos >= line.size()) {
      if (in_quotes) {
        std::string more;
        if (!next_line(&more)) return false;
        field.push_back('\n');
        line = std::move(more);
        pos = 0;
        continue;
      }
      out->push_back(std::move(field));
      return true;
    }
    const char ch = line[pos++];
    if (in_quotes) {
      if (ch == '"') {
        if (pos < line.size() && line[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      in_quotes = true;
      was_quoted = true;
    } else if (ch == sep) {
      out->push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, char sep = ',')
      : in_(in), source_(std::move(source)), sep_(sep) {}

  // Returns false at end of input. Blank lines are skipped.
  bool Next(CsvRow* row) {
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) return false;
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) break;
    }
    row->line = line_;
    auto next_line = [this](std::string* more) {
      if (!std::getline(in_, *more)) return false;
      ++line_;
      if (!more->empty() && more->back() == '\r') more->pop_back();
      return true;
    };
    if (!ParseCsvRecord(std::move(line), sep_, next_line, &row->fields)) {
      Fail(row->line, "unterminated quoted field");
    }
    return true;
  }

  // Reads the header row and checks it against `expected`.
  void ExpectHeader(const std::vector<std::string>& expected) {
    CsvRow row;
    if (!Next(&row)) Fail(1, "missing header");
    if (row.fields != expected) {
      std::string want;
      for (std::size_t k = 0; k < expected.size(); ++k) {
        if (k) want.push_back(sep_);
        want += expected[k];
      }
      Fail(row.line, "bad header, expected '" + want + "'");
    }
  }

  [[noreturn]] void Fail(int line, const std::string& message) const {
    throw DataError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  char sep_;
  int line_ = 0;
};

inline std::string CsvQuote(std::string_view field, char sep = ',') {
  const bool needs = field.find_first_of(std::string{sep, '"', '\n', '\r'}) !=
                         std::string_view::npos ||
                     (!field.empty() && (field.front() == ' ' ||
                                         field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline void WriteCsvRow(std::ostream& out,
                        const std::vector<std::string>& fields,
                        char sep = ',') {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out.put(sep);
    out << CsvQuote(fields[k], sep);
  }
  out.put('\n');
}

// Shortest decimal representation that round-trips exactly.
inline std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// Hexadecimal float, used where files must round-trip bit-exactly.
inline std::string FormatHexDouble(double value) {
  char buf[64];
  const bool negative = std::signbit(value);
  auto res = std::to_chars(buf, buf + sizeof(buf), negative ? -value : value,
                           std::chars_format::hex);
  return std::string(negative ? "-0x" : "0x") + std::string(buf, res.ptr);
}

inline bool ParseDouble(std::string_view text, double* value) {
  auto fmt = std::chars_format::general;
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    body.remove_prefix(2);
    fmt = std::chars_format::hex;
  } else {
    body = text;
    negative = false;
  }
  if (body.empty()) return false;
  auto res = std::from_chars(body.data(), body.data() + body.size(), *value,
                             fmt);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    return false;
  }
  if (negative) *value = -*value;
  return true;
}

inline bool ParseInt(std::string_view text, long long* value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto res = std::from_chars(text.data(), text.data() + text.size(), *value);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

inline std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

inline std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace revmatch

#endif  // REVMATCH_CSV_H_
