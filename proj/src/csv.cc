// Copyright 2026 The cmwb Authors.
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

#include "cmwb/csv.h"

#include <cstdio>

#include "cmwb/error.h"

namespace cmwb::csv {

std::vector<Row> Parse(std::string_view data, char delimiter) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = data.size();
  bool at_record_start = true;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("malformed CSV: line " + std::to_string(line) + " has " +
                  std::to_string(row.size()) + " fields, expected " +
                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
    row.clear();
    at_record_start = true;
  };

  while (i < n) {
    char c = data[i];
    if (at_record_start && (c == '\n' || (c == '\r' && i + 1 < n &&
                                           data[i + 1] == '\n'))) {
      // Blank lines carry no record.
      i += (c == '\r') ? 2 : 1;
      ++line;
      continue;
    }
    if (c == '"' && field.empty()) {
      // Quoted field.
      const std::size_t open_line = line;
      ++i;
      for (;;) {
        if (i >= n) {
          throw Error("malformed CSV: unterminated quote opened on line " +
                      std::to_string(open_line));
        }
        if (data[i] == '"') {
          if (i + 1 < n && data[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (data[i] == '\n') ++line;
        field.push_back(data[i++]);
      }
      at_record_start = false;
      if (i < n && data[i] != delimiter && data[i] != '\n' && data[i] != '\r') {
        throw Error("malformed CSV: text after closing quote on line " +
                    std::to_string(line));
      }
      if (i < n && data[i] == delimiter) {
        end_field();
        ++i;
        at_record_start = false;
        continue;
      }
      continue;
    }
    if (c == delimiter) {
      end_field();
      at_record_start = false;
      ++i;
    } else if (c == '\r' && i + 1 < n && data[i + 1] == '\n') {
      end_record();
      ++line;
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++line;
      ++i;
    } else {
      field.push_back(c);
      at_record_start = false;
      ++i;
    }
  }
  if (!at_record_start) end_record();
  return rows;
}

std::string Escape(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) !=
      std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string FormatRow(const Row &row, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    out += Escape(row[i], delimiter);
  }
  out.push_back('\n');
  return out;
}

std::string FormatSignificant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string FormatFixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace cmwb::csv
