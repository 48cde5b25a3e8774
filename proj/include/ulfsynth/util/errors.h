// Copyright 2026 The ulfsynth Authors.
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

#ifndef ULFSYNTH_UTIL_ERRORS_H_
#define ULFSYNTH_UTIL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ulfsynth {

// Base of every error thrown by the toolkit. Callers that only need to
// report a failure can catch this; the subclasses exist so tests and the CLI
// can tell the failure classes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (grid mismatch, linear
// interpolation on labels, too few inputs, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. The message names the offending field.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTypeError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DimensionalityError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (generator config, recipe, scheme file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Structured-text parse failure; message carries row/line and field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a semantic invariant (duplicate keys, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A metric needs a structure that is absent on one side.
class EmptyStructureError : public Error {
 public:
  EmptyStructureError(const std::string& what, std::string side)
      : Error(what), side_(std::move(side)) {}
  const std::string& side() const { return side_; }

 private:
  std::string side_;
};

}  // namespace ulfsynth

#endif  // ULFSYNTH_UTIL_ERRORS_H_
