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

#ifndef CMWB_TEXT_H_
#define CMWB_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Every text offset in the library counts Unicode scalar
// values, so these are the only places that deal with bytes.
namespace cmwb::text {

// Half-open range of scalar-value offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Span &) const = default;
  auto operator<=>(const Span &) const = default;
};

// Throws cmwb::Error on malformed input (overlong forms, surrogates,
// truncated sequences).
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view text);
void Append(std::string *out, char32_t c);

std::size_t ScalarLength(std::string_view utf8);

// Slice by scalar offsets; out-of-range bounds are clamped.
std::string Slice(std::string_view utf8, std::size_t start, std::size_t end);

bool IsSpace(char32_t c);
bool IsPunct(char32_t c);
bool IsDigit(char32_t c);
// Letters and digits; the complement defines token boundaries.
bool IsWordChar(char32_t c);

// Simple one-to-one case mapping, so lowercasing never changes offsets.
char32_t ToLower(char32_t c);
std::u32string ToLower(std::u32string_view text);
std::string ToLower(std::string_view utf8);

// Splits on whitespace and trims leading/trailing punctuation from each
// piece. Pieces that are all punctuation are dropped.
std::vector<Span> SplitWords(std::u32string_view text);

}  // namespace cmwb::text

#endif  // CMWB_TEXT_H_
