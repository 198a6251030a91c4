// Copyright 2026 The mfgmajor Authors. All rights reserved.
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

#ifndef MFGMAJOR_ERRORS_HPP_
#define MFGMAJOR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mfgmajor {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the admissible domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double time)
      : Error(what), time_(time) {}
  // Grid time at which the singularity was detected (NaN if not applicable).
  double time() const { return time_; }

 private:
  double time_;
};

// Invalid configuration entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace mfgmajor

#endif  // MFGMAJOR_ERRORS_HPP_
