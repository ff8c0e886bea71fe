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

#ifndef CMWB_TESTS_TEST_UTIL_H_
#define CMWB_TESTS_TEST_UTIL_H_

#include <cstdlib>
#include <filesystem>
#include <string>

#include "cmwb/fileutil.h"

namespace cmwb::testing {

// A fresh directory removed again on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "cmwb-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path TestData(const std::string &name) {
  return std::filesystem::path(CMWB_TEST_DATA) / name;
}

// Compares against a golden file; CMWB_UPDATE_GOLDEN=1 rewrites it instead.
inline bool MatchesGolden(const std::string &actual, const std::string &name) {
  const auto path = TestData("golden/" + name);
  if (const char *u = std::getenv("CMWB_UPDATE_GOLDEN"); u && *u == '1') {
    WriteFileAtomic(path, actual);
    return true;
  }
  return std::filesystem::exists(path) && ReadFile(path) == actual;
}

}  // namespace cmwb::testing

#endif  // CMWB_TESTS_TEST_UTIL_H_
