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

#ifndef DCEE_SIMULATOR_HPP
#define DCEE_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcee/dispersion.hpp"
#include "dcee/estimator.hpp"
#include "dcee/planner.hpp"
#include "dcee/sensor.hpp"

namespace dcee {

/// How position error is summarized.
enum class RmseMode {
  kPerAxis,    ///< sqrt(mean over x, y, z of squared error)
  kEuclidean,  ///< |mean - truth|
};

struct Scenario {
  std::string name = "default";
  SourceTerm ground_truth{{25.0, 25.0, 1.0}, 5.0, 4.0, 0.0, 1.0, 8.0};
  DomainBounds bounds;
  Position start{2.0, 2.0, 4.0};
  PriorSpec prior;
  SensorParams sensor;
  std::size_t particle_count = 2000;
  double resample_threshold_ratio = 0.5;
  McmcConfig mcmc;
  PlannerConfig planner;
  int step_budget = 900;
  std::uint64_t seed = 1;
  RmseMode rmse_mode = RmseMode::kPerAxis;
  double acquisition_threshold = 3.0;  ///< meters
};

/// Throws ConfigError naming the offending field.
void validate(const Scenario& sc);

/// Builds the prior used for a search over `bounds`: uniform source position, gamma release
/// rate, and the remaining parameters pinned to `truth`.
PriorSpec default_prior(const DomainBounds& bounds, const SourceTerm& truth);

struct StepRow {
  int step = 0;
  Position position;
  Measurement measurement;
  SourceTerm posterior_mean;
  double cov_trace = 0.0;
  double ess = 0.0;
  bool resampled = false;
  double mcmc_acceptance = 0.0;
  std::optional<Action> action;      ///< move that led to `position`; empty on the first row
  std::vector<double> action_scores;  ///< per-candidate planner scores for that move
};

struct RunRecord {
  Strategy strategy = Strategy::kDcee;
  std::vector<StepRow> rows;
  ParticleSet terminal_posterior;
  std::vector<std::string> warnings;
};

struct Metrics {
  std::vector<double> rmse_series;
  double final_rmse = 0.0;
  bool source_acquired = false;
  bool plume_acquired = false;
  std::optional<int> first_detection_step;
};

/// Position error of `estimate` against `truth` under `mode`.
double position_rmse(const Position& estimate, const Position& truth, RmseMode mode) noexcept;

/// Closed loop: measure, update (with resample and move when ESS drops), plan, move.
/// Row 0 is the measurement at the start position; each further step adds one row.
/// Deterministic in the scenario (including its seed).
RunRecord run_episode(const Scenario& sc);

Metrics compute_metrics(const RunRecord& rec, const Scenario& sc);

struct BatchCell {
  std::size_t scenario_index = 0;
  Strategy strategy = Strategy::kDcee;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  std::string error;
  Metrics metrics;
};

struct AcquisitionSummary {
  std::size_t cells = 0;
  std::size_t completed = 0;
  std::size_t source_acquired = 0;
  std::size_t plume_acquired = 0;

  /// Rates are over all cells; a failed episode counts as not acquired.
  [[nodiscard]] double source_rate() const noexcept {
    return cells == 0 ? 0.0 : static_cast<double>(source_acquired) / static_cast<double>(cells);
  }
  [[nodiscard]] double plume_rate() const noexcept {
    return cells == 0 ? 0.0 : static_cast<double>(plume_acquired) / static_cast<double>(cells);
  }
};

struct StrategySummary {
  Strategy strategy = Strategy::kDcee;
  AcquisitionSummary overall;
  std::vector<AcquisitionSummary> per_scenario;
  std::vector<double> mean_rmse;  ///< aligned by step over completed cells
  double mean_final_rmse = 0.0;
};

struct BatchReport {
  std::uint64_t base_seed = 0;
  int repeats = 0;
  std::vector<std::string> scenario_names;
  std::vector<BatchCell> cells;  ///< ordered by (scenario, strategy, repeat)
  std::vector<StrategySummary> strategies;
};

/// Seed of one batch cell. Independent of the strategy so every planner faces the same prior
/// draw and sensor noise stream for a given (scenario, repeat).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t scenario_index, int repeat) noexcept;

/// Called after each finished cell with (done, total).
using ProgressCallback = std::function<void(std::size_t, std::size_t)>;

/// Runs every (scenario, strategy, repeat) cell on up to `jobs` threads. Failed episodes are
/// recorded and skipped in aggregation. The report does not depend on `jobs`.
BatchReport run_batch(std::span<const Scenario> scenarios, std::span<const Strategy> strategies, int repeats,
                      std::uint64_t base_seed, int jobs = 1, const ProgressCallback& progress = {});

}  // namespace dcee

#endif  // DCEE_SIMULATOR_HPP
