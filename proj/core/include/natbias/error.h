// Copyright 2026 The natbias Authors.
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

#ifndef NATBIAS_ERROR_H_
#define NATBIAS_ERROR_H_

#include <stdexcept>
#include <string>

namespace natbias {

// Coarse failure category. The command-line tool maps these onto exit codes.
enum class ErrorKind {
  kValidation,   // malformed input, violated precondition
  kMissingData,  // embedding or score not present in a store
  kIo,           // file could not be opened or read
  kTransport,    // external encoder process failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Same category, message prefixed with `context`.
  Error WithContext(const std::string& context) const {
    return Error(kind_, context + ": " + what());
  }

 private:
  ErrorKind kind_;
};

inline Error ValidationError(const std::string& message) {
  return Error(ErrorKind::kValidation, message);
}
inline Error MissingDataError(const std::string& message) {
  return Error(ErrorKind::kMissingData, message);
}
inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}

}  // namespace natbias

#endif  // NATBIAS_ERROR_H_
