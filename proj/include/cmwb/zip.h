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

#ifndef CMWB_ZIP_H_
#define CMWB_ZIP_H_

#include <string>
#include <string_view>
#include <vector>

namespace cmwb::zip {

struct Entry {
  std::string name;
  std::string data;

  bool operator==(const Entry &) const = default;
};

// Stored (uncompressed) archive in the given entry order, with a fixed
// 1980-01-01 timestamp so identical entries give identical bytes.
std::string Write(const std::vector<Entry> &entries);

// Reads stored and deflated entries, checking CRC-32. Throws cmwb::Error on
// anything else.
std::vector<Entry> Read(std::string_view archive);

}  // namespace cmwb::zip

#endif  // CMWB_ZIP_H_
