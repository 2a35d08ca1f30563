// Copyright 2026 The twofactor Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twofactor {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or law parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A function argument is outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Misuse of an API (mismatched lengths, missing inputs).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// One or more ModelSpec invariants failed. `fields()` names every offender.
class ValidationError : public Error {
 public:
  ValidationError(std::vector<std::string> fields, const std::string& detail)
      : Error(detail), fields_(std::move(fields)) {}

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// A configuration document is malformed or names an unknown field.
/// `field()` is a dotted path such as "model.alpha" (empty if unknown).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& detail)
      : Error(field.empty() ? detail : field + ": " + detail), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Adaptive quadrature could not reach the requested tolerance.
class NumericAccuracyError : public Error {
 public:
  NumericAccuracyError(const std::string& what, double achieved_error, double requested)
      : Error(what), achieved_(achieved_error), requested_(requested) {}

  double achieved_error() const noexcept { return achieved_; }
  double requested_error() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

}  // namespace twofactor
