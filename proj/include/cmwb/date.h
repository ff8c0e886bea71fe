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

#ifndef CMWB_DATE_H_
#define CMWB_DATE_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cmwb {

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date &) const = default;

  // ISO 8601 calendar form, YYYY-MM-DD.
  std::string ToString() const;
};

bool IsValidDate(int year, int month, int day);

// Parses `text` under a strftime-like pattern supporting %Y, %m, %d, %%
// and literal characters. The whole input must be consumed and the result
// must be a real calendar date.
std::optional<Date> ParseDate(std::string_view text, std::string_view format);

}  // namespace cmwb

#endif  // CMWB_DATE_H_
