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

#ifndef CMWB_ERROR_H_
#define CMWB_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace cmwb {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single offending field in a parameter object, addressed by a dotted path.
struct FieldError {
  std::string path;
  std::string message;
};

// Parameter validation failure; carries every offending field, not just the
// first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> fields);
  ValidationError(std::string path, std::string message);

  const std::vector<FieldError> &fields() const { return fields_; }

 private:
  std::vector<FieldError> fields_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Raised from inside long-running computations when a caller cancels them.
class Cancelled : public Error {
 public:
  Cancelled() : Error("cancelled") {}
};

}  // namespace cmwb

#endif  // CMWB_ERROR_H_
