// Copyright 2026 The sbb Authors.
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

namespace sbb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a positivity, ordering or hierarchy rule. `field()` names
/// the offending quantity ("omega0", "delta", "hierarchy", ...).
class DomainError : public Error {
 public:
  DomainError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The closed-form switching structure does not exist for these bounds.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A shooting residual could not be evaluated for the given times.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  SingularJacobian(int iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Malformed protocol / config document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbb
