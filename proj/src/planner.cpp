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

#include "dcee/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcee/errors.hpp"

namespace dcee {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Heading {
  int degrees;
  double cos;
  double sin;
};

// Exact unit vectors so axis-aligned moves have exactly zero cross components.
constexpr double kDiag = std::numbers::sqrt2 / 2.0;
constexpr std::array<Heading, 8> kHeadings = {{{0, 1.0, 0.0},
                                               {45, kDiag, kDiag},
                                               {90, 0.0, 1.0},
                                               {135, -kDiag, kDiag},
                                               {180, -1.0, 0.0},
                                               {225, -kDiag, -kDiag},
                                               {270, 0.0, -1.0},
                                               {315, kDiag, -kDiag}}};

// Draws particle indices proportionally to (possibly unnormalized) weights.
class IndexSampler {
 public:
  explicit IndexSampler(std::span<const double> weights) : cumulative_(weights.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      sum += weights[i];
      cumulative_[i] = sum;
    }
  }

  std::size_t draw(Rng& rng) const {
    const double target = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx, cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

std::vector<double> concentrations_at(const ParticleSet& ps, const Position& p) {
  std::vector<double> conc(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    conc[i] = concentration(p, ps.particles[i]);
  }
  return conc;
}

std::vector<double> log_weights(const ParticleSet& ps) {
  std::vector<double> out(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out[i] = ps.weights[i] > 0.0 ? std::log(ps.weights[i]) : kNegInf;
  }
  return out;
}

// log_w_out = log_w_in + log p(reading | particle). Returns false when every live particle
// sits at the likelihood floor.
bool reweight(std::span<const double> log_w_in, std::span<const double> conc, double value, bool detected,
              const SensorParams& sp, std::vector<double>& log_w_out) {
  const double log_floor = std::log(sp.likelihood_floor);
  log_w_out.resize(log_w_in.size());
  double max_ll = kNegInf;
  for (std::size_t i = 0; i < log_w_in.size(); ++i) {
    if (log_w_in[i] == kNegInf) {
      log_w_out[i] = kNegInf;
      continue;
    }
    const double ll = log_likelihood(value, detected, conc[i], sp);
    max_ll = std::max(max_ll, ll);
    log_w_out[i] = log_w_in[i] + ll;
  }
  return max_ll > log_floor;
}

// Normalized linear weights from log weights.
void to_weights(std::span<const double> log_w, std::vector<double>& w) {
  const double max_log = *std::max_element(log_w.begin(), log_w.end());
  w.resize(log_w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    w[i] = std::exp(log_w[i] - max_log);
    sum += w[i];
  }
  for (auto& v : w) {
    v /= sum;
  }
}

// |p - mean|^2 + trace(P) for the position marginal of the weighted set.
double distance_plus_spread(const ParticleSet& ps, std::span<const double> w, const Position& p) {
  Position mean;
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean.x += w[i] * ps.particles[i].source.x;
    mean.y += w[i] * ps.particles[i].source.y;
    mean.z += w[i] * ps.particles[i].source.z;
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    trace += w[i] * squared_distance(ps.particles[i].source, mean);
  }
  return squared_distance(p, mean) + trace;
}

Measurement draw_reading(const IndexSampler& sampler, std::span<const double> conc, const Position& where,
                         const SensorParams& sp, Rng& rng) {
  const std::size_t idx = sampler.draw(rng);
  Measurement m = sample_measurement(conc[idx], sp, rng);
  m.position = where;
  return m;
}

std::size_t best_index(std::span<const double> scores, bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (maximize ? scores[i] > scores[best] : scores[i] < scores[best]) {
      best = i;
    }
  }
  return best;
}

// Depth-first enumeration of admissible action sequences that start with `prefix`.
void enumerate_sequences(const Position& p, const DomainBounds& bounds, const PlannerConfig& cfg, int remaining,
                         std::vector<Action>& prefix, std::vector<std::vector<Action>>& out) {
  if (remaining == 0) {
    out.push_back(prefix);
    return;
  }
  for (const auto& a : candidate_actions(p, bounds, cfg)) {
    prefix.push_back(a);
    enumerate_sequences(p + a.delta(), bounds, cfg, remaining - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kDcee:
      return "dcee";
    case Strategy::kMpc:
      return "mpc";
    case Strategy::kEntrotaxis:
      return "entrotaxis";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  if (name == "dcee") return Strategy::kDcee;
  if (name == "mpc") return Strategy::kMpc;
  if (name == "entrotaxis") return Strategy::kEntrotaxis;
  return std::nullopt;
}

void validate(const PlannerConfig& cfg) {
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size)) {
    throw ConfigError("planner.step_size", "must be > 0");
  }
  if (cfg.predictions_per_step < 1) {
    throw ConfigError("planner.predictions_per_step", "must be >= 1");
  }
  if (cfg.horizon < 1 || cfg.horizon > kMaxHorizon) {
    throw ConfigError("planner.horizon", "must lie in [1, " + std::to_string(kMaxHorizon) + "]");
  }
  if (cfg.entropy_bins < 1) {
    throw ConfigError("planner.entropy_bins", "must be >= 1");
  }
}

std::vector<Action> candidate_actions(const Position& p, const DomainBounds& bounds, const PlannerConfig& cfg) {
  if (!bounds.contains(p)) {
    throw InvalidParameter("planner queried from a position outside the search domain");
  }
  std::vector<Action> out;
  out.reserve(10);
  for (const auto& h : kHeadings) {
    const Action a{cfg.step_size * h.cos, cfg.step_size * h.sin, 0.0, h.degrees, 0};
    if (bounds.contains(p + a.delta())) {
      out.push_back(a);
    }
  }
  if (cfg.vertical_moves) {
    for (const int e : {1, -1}) {
      const Action a{0.0, 0.0, e * cfg.step_size, 0, e};
      if (bounds.contains(p + a.delta())) {
        out.push_back(a);
      }
    }
  }
  return out;
}

std::vector<Measurement> hypothesize_measurements(const ParticleSet& ps, const Position& p_next, const SensorParams& sp,
                                                  int count, Rng& rng) {
  const IndexSampler sampler(ps.weights);
  const auto conc = concentrations_at(ps, p_next);
  std::vector<Measurement> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int j = 0; j < count; ++j) {
    out.push_back(draw_reading(sampler, conc, p_next, sp, rng));
  }
  return out;
}

double dcee_cost(const ParticleSet& ps, const Position& p, const Action& a, const SensorParams& sp,
                 const PlannerConfig& cfg, Rng& rng) {
  const Position next = p + a.delta();
  const auto conc = concentrations_at(ps, next);
  const auto log_w = log_weights(ps);
  const IndexSampler sampler(ps.weights);

  std::vector<double> scratch_log_w;
  std::vector<double> scratch_w;
  // Every non-detection induces the same hypothetical posterior.
  std::optional<double> non_detection_cost;
  double total = 0.0;
  for (int j = 0; j < cfg.predictions_per_step; ++j) {
    const Measurement m = draw_reading(sampler, conc, next, sp, rng);
    if (!m.detected && non_detection_cost) {
      total += *non_detection_cost;
      continue;
    }
    double cost = kInf;
    if (reweight(log_w, conc, m.value, m.detected, sp, scratch_log_w)) {
      to_weights(scratch_log_w, scratch_w);
      cost = distance_plus_spread(ps, scratch_w, next);
    }
    if (!m.detected) {
      non_detection_cost = cost;
    }
    total += cost;
  }
  return total / cfg.predictions_per_step;
}

double mpc_cost(const ParticleSet& ps, const Position& p, const Action& a) {
  return distance_plus_spread(ps, ps.weights, p + a.delta());
}

double binned_measurement_entropy(std::span<const Measurement> readings, int bins) {
  if (readings.empty()) {
    return 0.0;
  }
  std::vector<double> detected;
  for (const auto& m : readings) {
    if (m.detected) {
      detected.push_back(m.value);
    }
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins) + 1, 0);
  counts[0] = readings.size() - detected.size();
  if (!detected.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(detected.begin(), detected.end());
    const double lo = *lo_it;
    const double width = *hi_it - lo;
    for (const double v : detected) {
      std::size_t bin = 0;
      if (width > 0.0) {
        bin = std::min(static_cast<std::size_t>((v - lo) / width * bins), static_cast<std::size_t>(bins) - 1);
      }
      ++counts[bin + 1];
    }
  }
  const double n = static_cast<double>(readings.size());
  double entropy = 0.0;
  for (const auto c : counts) {
    if (c > 0) {
      const double prob = static_cast<double>(c) / n;
      entropy -= prob * std::log(prob);
    }
  }
  return entropy;
}

double entrotaxis_reward(const ParticleSet& ps, const Position& p, const Action& a, const SensorParams& sp,
                         const PlannerConfig& cfg, Rng& rng) {
  const auto readings = hypothesize_measurements(ps, p + a.delta(), sp, cfg.predictions_per_step, rng);
  return binned_measurement_entropy(readings, cfg.entropy_bins);
}

double dcee_cost_multistage(const ParticleSet& ps, const Position& p, std::span<const Action> actions,
                            const SensorParams& sp, const PlannerConfig& cfg, Rng& rng) {
  if (actions.empty() || actions.size() > static_cast<std::size_t>(kMaxHorizon)) {
    throw ConfigError("planner.horizon", "multistage horizon must lie in [1, " + std::to_string(kMaxHorizon) + "]");
  }
  std::vector<Position> waypoints;
  std::vector<std::vector<double>> conc;
  Position cursor = p;
  for (const auto& a : actions) {
    cursor = cursor + a.delta();
    waypoints.push_back(cursor);
    conc.push_back(concentrations_at(ps, cursor));
  }
  const auto prior_log_w = log_weights(ps);
  const IndexSampler first_stage(ps.weights);

  std::vector<double> log_w;
  std::vector<double> next_log_w;
  std::vector<double> w;
  double total = 0.0;
  for (int j = 0; j < cfg.predictions_per_step; ++j) {
    log_w = prior_log_w;
    bool degenerate = false;
    for (std::size_t t = 0; t < waypoints.size(); ++t) {
      Measurement m;
      if (t == 0) {
        m = draw_reading(first_stage, conc[t], waypoints[t], sp, rng);
      } else {
        to_weights(log_w, w);
        m = draw_reading(IndexSampler(w), conc[t], waypoints[t], sp, rng);
      }
      if (!reweight(log_w, conc[t], m.value, m.detected, sp, next_log_w)) {
        degenerate = true;
      }
      std::swap(log_w, next_log_w);
    }
    if (degenerate) {
      total = kInf;
      continue;
    }
    to_weights(log_w, w);
    total += distance_plus_spread(ps, w, waypoints.back());
  }
  return total / cfg.predictions_per_step;
}

ActionChoice select_action(const ParticleSet& ps, const Position& p, const DomainBounds& bounds,
                           const SensorParams& sp, const PlannerConfig& cfg, Rng& rng) {
  ActionChoice choice;
  choice.candidates = candidate_actions(p, bounds, cfg);
  if (choice.candidates.empty()) {
    throw InvalidParameter("no admissible action from the current position");
  }
  const Rng shared = make_rng(rng());
  const std::size_t n = choice.candidates.size();
  if (n == 1) {
    choice.action = choice.candidates.front();
    choice.scores.assign(1, std::numeric_limits<double>::quiet_NaN());
    return choice;
  }

  choice.scores.resize(n);
  bool maximize = false;
  switch (cfg.strategy) {
    case Strategy::kMpc:
      for (std::size_t i = 0; i < n; ++i) {
        choice.scores[i] = mpc_cost(ps, p, choice.candidates[i]);
      }
      break;
    case Strategy::kEntrotaxis:
      maximize = true;
      for (std::size_t i = 0; i < n; ++i) {
        Rng local = shared;
        choice.scores[i] = entrotaxis_reward(ps, p, choice.candidates[i], sp, cfg, local);
      }
      break;
    case Strategy::kDcee:
      for (std::size_t i = 0; i < n; ++i) {
        if (cfg.horizon <= 1) {
          Rng local = shared;
          choice.scores[i] = dcee_cost(ps, p, choice.candidates[i], sp, cfg, local);
          continue;
        }
        std::vector<Action> prefix{choice.candidates[i]};
        std::vector<std::vector<Action>> sequences;
        enumerate_sequences(p + choice.candidates[i].delta(), bounds, cfg, cfg.horizon - 1, prefix, sequences);
        double best = kInf;
        for (const auto& seq : sequences) {
          Rng local = shared;
          best = std::min(best, dcee_cost_multistage(ps, p, seq, sp, cfg, local));
        }
        choice.scores[i] = best;
      }
      if (std::all_of(choice.scores.begin(), choice.scores.end(), [](double s) { return s == kInf; })) {
        choice.degraded = true;
        for (std::size_t i = 0; i < n; ++i) {
          choice.scores[i] = mpc_cost(ps, p, choice.candidates[i]);
        }
      }
      break;
  }
  choice.index = best_index(choice.scores, maximize);
  choice.action = choice.candidates[choice.index];
  return choice;
}

}  // namespace dcee
