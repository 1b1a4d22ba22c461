// Copyright 2026 The cacp Authors. All Rights Reserved.
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

#ifndef CACP_ERROR_H_
#define CACP_ERROR_H_

#include <stdexcept>
#include <string>

namespace cacp {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation
// (non-positive distance, compression ratio outside (0, 1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or semantically invalid configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be processed (empty image, mismatched sizes).
class InputError : public Error {
 public:
  using Error::Error;
};

// A serialized artifact (encoded frame, PNM file) is inconsistent.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The distortion budget cannot be met even with every helper uncompressed.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double min_budget)
      : Error(what), min_budget_(min_budget) {}
  double min_budget() const { return min_budget_; }

 private:
  double min_budget_;
};

// Wraps a failure inside one pipeline stage; what() is "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace cacp

#endif  // CACP_ERROR_H_
