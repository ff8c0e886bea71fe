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

#include "cmwb/error.h"

#include <utility>

namespace cmwb {

namespace {

std::string Summarize(const std::vector<FieldError> &fields) {
  std::string msg = "invalid parameters:";
  for (const auto &f : fields) msg += " " + f.path + " (" + f.message + ")";
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldError> fields)
    : Error(Summarize(fields)), fields_(std::move(fields)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(
          std::vector<FieldError>{{std::move(path), std::move(message)}}) {}

}  // namespace cmwb
