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

#include "cmwb/date.h"

#include <cstdio>

namespace cmwb {

std::string Date::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

bool IsValidDate(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30,
                                  31, 31, 30, 31, 30, 31};
  int limit = kDays[month - 1];
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) limit = 29;
  return day <= limit;
}

namespace {

// Reads between min_digits and max_digits decimal digits.
bool ReadNumber(std::string_view text, std::size_t *pos, int min_digits,
                int max_digits, int *value) {
  int digits = 0;
  int v = 0;
  while (*pos < text.size() && digits < max_digits && text[*pos] >= '0' &&
         text[*pos] <= '9') {
    v = v * 10 + (text[*pos] - '0');
    ++*pos;
    ++digits;
  }
  if (digits < min_digits) return false;
  *value = v;
  return true;
}

}  // namespace

std::optional<Date> ParseDate(std::string_view text, std::string_view format) {
  Date date;
  bool has_year = false;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] != '%') {
      if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
      ++pos;
      continue;
    }
    if (++f >= format.size()) return std::nullopt;
    switch (format[f]) {
      case 'Y':
        if (!ReadNumber(text, &pos, 4, 4, &date.year)) return std::nullopt;
        has_year = true;
        break;
      case 'm':
        if (!ReadNumber(text, &pos, 1, 2, &date.month)) return std::nullopt;
        break;
      case 'd':
        if (!ReadNumber(text, &pos, 1, 2, &date.day)) return std::nullopt;
        break;
      case '%':
        if (pos >= text.size() || text[pos] != '%') return std::nullopt;
        ++pos;
        break;
      default:
        return std::nullopt;
    }
  }
  if (pos != text.size() || !has_year) return std::nullopt;
  if (!IsValidDate(date.year, date.month, date.day)) return std::nullopt;
  return date;
}

}  // namespace cmwb
