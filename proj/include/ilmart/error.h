// Copyright 2026 The ilmart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ILMART_ERROR_H_
#define ILMART_ERROR_H_

#include <stdexcept>
#include <string>

namespace ilmart {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data. `line()` is 1-based, or 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid hyper-parameters or option combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A model whose structure breaks one of the additive-model invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace ilmart

#endif  // ILMART_ERROR_H_
