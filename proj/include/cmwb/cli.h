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

#ifndef CMWB_CLI_H_
#define CMWB_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cmwb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// What a command will do once flags, config file and defaults are merged.
// Paths are absolute; randomized commands always carry a seed.
struct CommandPlan {
  std::string subcommand;  // "lda", "topics show", ...
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, std::filesystem::path> inputs;
  std::map<std::string, std::filesystem::path> outputs;
  std::optional<std::uint64_t> seed;

  nlohmann::json ToJson() const;
};

// Runs one command line, `args` excluding the program name. Results go to
// `out`; usage text, progress and errors go to `err`. Returns kExitOk,
// kExitFailure on a runtime error or kExitUsage on a usage error.
int Execute(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

}  // namespace cmwb::cli

#endif  // CMWB_CLI_H_
