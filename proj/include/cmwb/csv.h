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

#ifndef CMWB_CSV_H_
#define CMWB_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace cmwb::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader. Accepts LF or CRLF record separators and quoted fields
// spanning lines. Throws cmwb::Error naming the line on an unterminated
// quote, stray text after a closing quote, or a ragged row.
std::vector<Row> Parse(std::string_view data, char delimiter = ',');

// Quotes only when needed (delimiter, quote, CR or LF present).
std::string Escape(std::string_view field, char delimiter = ',');
// One record terminated by LF.
std::string FormatRow(const Row &row, char delimiter = ',');

// printf-style "%.{digits}g" / "%.{decimals}f" with the C locale.
std::string FormatSignificant(double value, int digits);
std::string FormatFixed(double value, int decimals);

}  // namespace cmwb::csv

#endif  // CMWB_CSV_H_
