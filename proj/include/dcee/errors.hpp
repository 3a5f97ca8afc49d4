// Copyright 2026 The DCEE Search Authors
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

#ifndef DCEE_ERRORS_HPP
#define DCEE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dcee {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter is out of its admissible range or evaluates to a non-finite value.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A configuration value is missing, malformed or inconsistent.
/// `path` is the dotted location of the offending entry (e.g. `scenario.prior.release_rate.scale`).
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Every particle assigns (numerically) zero likelihood to a measurement.
class DegeneratePosterior : public Error {
 public:
  explicit DegeneratePosterior(int step)
      : Error("degenerate posterior at step " + std::to_string(step)), step_(step) {}

  [[nodiscard]] int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace dcee

#endif  // DCEE_ERRORS_HPP
