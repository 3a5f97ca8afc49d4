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

#ifndef DCEE_PLANNER_HPP
#define DCEE_PLANNER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcee/dispersion.hpp"
#include "dcee/estimator.hpp"
#include "dcee/random.hpp"
#include "dcee/sensor.hpp"

namespace dcee {

enum class Strategy { kDcee, kMpc, kEntrotaxis };

std::string_view to_string(Strategy s) noexcept;
/// Parses "dcee", "mpc" or "entrotaxis".
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// One admissible move. Planar moves carry a compass heading in degrees; vertical moves
/// (only generated when enabled) have `elevation` of +1 or -1.
struct Action {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  int heading_deg = 0;
  int elevation = 0;

  [[nodiscard]] Position delta() const noexcept { return {dx, dy, dz}; }
  friend bool operator==(const Action&, const Action&) = default;
};

struct PlannerConfig {
  Strategy strategy = Strategy::kDcee;
  double step_size = 2.0;
  int predictions_per_step = 40;
  int horizon = 1;
  int entropy_bins = 8;
  bool vertical_moves = false;
};

inline constexpr int kMaxHorizon = 3;

/// Throws ConfigError on invalid planner settings.
void validate(const PlannerConfig& cfg);

/// The compass moves (plus up/down when enabled) whose successor stays inside `bounds`,
/// ordered by heading 0, 45, ..., 315 degrees. Throws InvalidParameter if `p` lies outside.
std::vector<Action> candidate_actions(const Position& p, const DomainBounds& bounds, const PlannerConfig& cfg);

/// Draws `count` readings from the posterior predictive at `p_next`: a particle index
/// proportional to weight, then the sensor model at that particle's concentration.
std::vector<Measurement> hypothesize_measurements(const ParticleSet& ps, const Position& p_next, const SensorParams& sp,
                                                  int count, Rng& rng);

/// Expected squared distance between the next position and the source under the hypothetical
/// posteriors produced by `cfg.predictions_per_step` hypothesized readings. Each hypothetical
/// posterior is a reweighting of `ps`; its contribution is |p_next - mean|^2 + trace(P).
/// Returns +infinity if any hypothetical posterior degenerates.
double dcee_cost(const ParticleSet& ps, const Position& p, const Action& a, const SensorParams& sp,
                 const PlannerConfig& cfg, Rng& rng);

/// |p + a - mean|^2 + trace(P) under the current posterior.
double mpc_cost(const ParticleSet& ps, const Position& p, const Action& a);

/// Shannon entropy (nats) of hypothesized readings at p + a, binned into one non-detection bin
/// and `cfg.entropy_bins` equal-width bins spanning the detected values.
double entrotaxis_reward(const ParticleSet& ps, const Position& p, const Action& a, const SensorParams& sp,
                         const PlannerConfig& cfg, Rng& rng);

/// Entropy of a sample of readings with the binning used by entrotaxis_reward.
double binned_measurement_entropy(std::span<const Measurement> readings, int bins);

/// Rollout version of dcee_cost over an action sequence (1 to kMaxHorizon moves). Each of the
/// `cfg.predictions_per_step` rollouts draws one reading per stage from the current hypothetical
/// posterior and reweights it; the terminal |p_N - mean|^2 + trace(P) is averaged.
double dcee_cost_multistage(const ParticleSet& ps, const Position& p, std::span<const Action> actions,
                            const SensorParams& sp, const PlannerConfig& cfg, Rng& rng);

struct ActionChoice {
  Action action;
  std::size_t index = 0;
  std::vector<Action> candidates;
  std::vector<double> scores;  ///< cost (dcee, mpc) or reward (entrotaxis) per candidate
  bool degraded = false;       ///< every dcee candidate was infinite; the mpc rule decided
};

/// Scores every candidate and returns the best one (lowest cost, highest reward; ties go to the
/// lowest heading). All candidates replay the same random draws. `rng` advances by exactly one
/// draw per call.
ActionChoice select_action(const ParticleSet& ps, const Position& p, const DomainBounds& bounds,
                           const SensorParams& sp, const PlannerConfig& cfg, Rng& rng);

}  // namespace dcee

#endif  // DCEE_PLANNER_HPP
