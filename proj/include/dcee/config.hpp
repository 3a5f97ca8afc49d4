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

#ifndef DCEE_CONFIG_HPP
#define DCEE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcee/planner.hpp"
#include "dcee/simulator.hpp"

namespace dcee {

inline constexpr int kSchemaVersion = 1;

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<Strategy> strategy;
  std::optional<int> repeats;
  std::optional<int> jobs;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> particles;
  std::optional<int> horizon;
};

/// A validated configuration document.
struct RunConfig {
  nlohmann::json effective;  ///< defaults merged with the file and overrides; echoed into outputs
  Scenario scenario;
  std::vector<Strategy> strategies;
  std::vector<Scenario> battery;  ///< empty when the file defines no battery
  int repeats = 10;
  std::uint64_t base_seed = 1;
  int jobs = 1;
  std::string output_dir = "out";

  /// Scenarios a batch runs over: the battery when present, otherwise the single scenario.
  [[nodiscard]] std::vector<Scenario> batch_scenarios() const;
};

/// The built-in defaults, as a complete config document.
nlohmann::json default_config_json();

/// Validates `doc` (unknown keys, types, ranges), merges it over the defaults, applies
/// `overrides` and builds the scenarios. Throws ConfigError with a dotted path on any violation.
RunConfig parse_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {});

/// Reads and parses a JSON file; syntax errors are reported as ConfigError.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

}  // namespace dcee

#endif  // DCEE_CONFIG_HPP
