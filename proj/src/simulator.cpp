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

#include "dcee/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "dcee/errors.hpp"

namespace dcee {

namespace {

// Independent streams inside one episode.
enum class Stream : std::uint64_t { kPrior = 1, kSensor = 2, kPlanner = 3, kFilter = 4 };

Rng stream(std::uint64_t seed, Stream s) { return make_rng(mix_seed(seed, {static_cast<std::uint64_t>(s)})); }

StepRow summarize(int step, const Position& pos, const Measurement& m, const ParticleSet& ps) {
  StepRow row;
  row.step = step;
  row.position = pos;
  row.measurement = m;
  row.posterior_mean = posterior_mean(ps);
  row.cov_trace = spatial_covariance_trace(ps);
  row.ess = effective_sample_size(ps);
  return row;
}

}  // namespace

void validate(const Scenario& sc) {
  try {
    validate(sc.ground_truth);
  } catch (const InvalidParameter& e) {
    throw ConfigError("scenario.ground_truth", e.what());
  }
  try {
    validate(sc.bounds);
  } catch (const InvalidParameter& e) {
    throw ConfigError("scenario.bounds", e.what());
  }
  try {
    validate(sc.sensor);
  } catch (const InvalidParameter& e) {
    throw ConfigError("scenario.sensor", e.what());
  }
  if (!sc.start.is_finite() || !sc.bounds.contains(sc.start)) {
    throw ConfigError("scenario.start", "start position must lie inside scenario.bounds");
  }
  validate(sc.prior);
  validate(sc.planner);
  if (sc.particle_count < 2) {
    throw ConfigError("scenario.particle_count", "must be >= 2");
  }
  if (!(sc.resample_threshold_ratio >= 0.0 && sc.resample_threshold_ratio <= 1.0)) {
    throw ConfigError("scenario.resample_threshold_ratio", "must lie in [0, 1]");
  }
  if (sc.mcmc.proposals_per_particle < 0) {
    throw ConfigError("scenario.mcmc.proposals_per_particle", "must be >= 0");
  }
  if (!(sc.mcmc.proposal_scale >= 0.0) || !(sc.mcmc.regularization >= 0.0)) {
    throw ConfigError("scenario.mcmc", "proposal_scale and regularization must be >= 0");
  }
  if (sc.step_budget < 0) {
    throw ConfigError("scenario.step_budget", "must be >= 0");
  }
  if (!(sc.acquisition_threshold > 0.0)) {
    throw ConfigError("scenario.acquisition_threshold", "must be > 0");
  }
}

PriorSpec default_prior(const DomainBounds& bounds, const SourceTerm& truth) {
  PriorSpec prior;
  prior.source_x = {{bounds.x.min, bounds.x.max}, true};
  prior.source_y = {{bounds.y.min, bounds.y.max}, true};
  prior.source_z = {{bounds.z.min, bounds.z.max}, true};
  prior.wind_dir.dist.mean = truth.wind_dir;
  prior.fixed = truth;
  return prior;
}

double position_rmse(const Position& estimate, const Position& truth, RmseMode mode) noexcept {
  const double sq = squared_distance(estimate, truth);
  return mode == RmseMode::kPerAxis ? std::sqrt(sq / 3.0) : std::sqrt(sq);
}

RunRecord run_episode(const Scenario& sc) {
  validate(sc);
  Rng prior_rng = stream(sc.seed, Stream::kPrior);
  Rng sensor_rng = stream(sc.seed, Stream::kSensor);
  Rng planner_rng = stream(sc.seed, Stream::kPlanner);
  Rng filter_rng = stream(sc.seed, Stream::kFilter);

  RunRecord rec;
  rec.strategy = sc.planner.strategy;
  rec.rows.reserve(static_cast<std::size_t>(sc.step_budget) + 1);

  ParticleSet ps = sample_prior(sc.prior, sc.particle_count, prior_rng);
  MeasurementHistory history;
  Position pos = sc.start;
  const double ess_threshold = sc.resample_threshold_ratio * static_cast<double>(sc.particle_count);

  for (int k = 0; k <= sc.step_budget; ++k) {
    std::optional<ActionChoice> choice;
    if (k > 0) {
      choice = select_action(ps, pos, sc.bounds, sc.sensor, sc.planner, planner_rng);
      pos = pos + choice->action.delta();
    }
    Measurement m = sample_measurement(concentration(pos, sc.ground_truth), sc.sensor, sensor_rng);
    m.position = pos;
    m.time_index = k;
    history.push_back(m);

    try {
      ps = bayes_update(ps, m, sc.sensor).posterior;
    } catch (const DegeneratePosterior& e) {
      ps.weights.assign(ps.size(), 1.0 / static_cast<double>(ps.size()));
      rec.warnings.push_back(std::string(e.what()) + "; weights reset to uniform");
    }

    bool resampled = false;
    double acceptance = 0.0;
    if (effective_sample_size(ps) < ess_threshold) {
      ps = systematic_resample(ps, filter_rng);
      auto moved = mcmc_move(ps, history, sc.prior, sc.sensor, filter_rng, sc.mcmc);
      ps = std::move(moved.particles);
      acceptance = moved.acceptance_rate;
      resampled = true;
    }

    StepRow row = summarize(k, pos, m, ps);
    row.resampled = resampled;
    row.mcmc_acceptance = acceptance;
    if (choice) {
      row.action = choice->action;
      row.action_scores = std::move(choice->scores);
    }
    rec.rows.push_back(std::move(row));
  }
  rec.terminal_posterior = std::move(ps);
  return rec;
}

Metrics compute_metrics(const RunRecord& rec, const Scenario& sc) {
  Metrics m;
  m.rmse_series.reserve(rec.rows.size());
  for (const auto& row : rec.rows) {
    m.rmse_series.push_back(position_rmse(row.posterior_mean.source, sc.ground_truth.source, sc.rmse_mode));
    if (row.measurement.value >= sc.sensor.threshold) {
      m.plume_acquired = true;
      if (!m.first_detection_step) {
        m.first_detection_step = row.step;
      }
    }
  }
  if (!m.rmse_series.empty()) {
    m.final_rmse = m.rmse_series.back();
    m.source_acquired = m.final_rmse < sc.acquisition_threshold;
  }
  return m;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t scenario_index, int repeat) noexcept {
  return mix_seed(base_seed, {static_cast<std::uint64_t>(scenario_index), static_cast<std::uint64_t>(repeat)});
}

BatchReport run_batch(std::span<const Scenario> scenarios, std::span<const Strategy> strategies, int repeats,
                      std::uint64_t base_seed, int jobs, const ProgressCallback& progress) {
  if (repeats < 1) {
    throw ConfigError("repeats", "must be >= 1");
  }
  for (const auto& sc : scenarios) {
    validate(sc);
  }
  BatchReport report;
  report.base_seed = base_seed;
  report.repeats = repeats;
  for (const auto& sc : scenarios) {
    report.scenario_names.push_back(sc.name);
  }
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (const auto strategy : strategies) {
      for (int r = 0; r < repeats; ++r) {
        BatchCell cell;
        cell.scenario_index = s;
        cell.strategy = strategy;
        cell.repeat = r;
        cell.seed = cell_seed(base_seed, s, r);
        report.cells.push_back(cell);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      auto& cell = report.cells[i];
      Scenario sc = scenarios[cell.scenario_index];
      sc.seed = cell.seed;
      sc.planner.strategy = cell.strategy;
      try {
        const RunRecord rec = run_episode(sc);
        cell.metrics = compute_metrics(rec, sc);
        cell.completed = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      const std::size_t finished = ++done;
      if (progress) {
        const std::lock_guard lock(progress_mutex);
        progress(finished, report.cells.size());
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(report.cells.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }

  // Deterministic fold in cell order.
  for (const auto strategy : strategies) {
    StrategySummary summary;
    summary.strategy = strategy;
    summary.per_scenario.resize(scenarios.size());
    std::vector<double> rmse_sum;
    std::vector<std::size_t> rmse_count;
    double final_sum = 0.0;
    for (const auto& cell : report.cells) {
      if (cell.strategy != strategy) {
        continue;
      }
      for (auto* acc : {&summary.overall, &summary.per_scenario[cell.scenario_index]}) {
        ++acc->cells;
        if (cell.completed) {
          ++acc->completed;
          acc->source_acquired += cell.metrics.source_acquired ? 1 : 0;
          acc->plume_acquired += cell.metrics.plume_acquired ? 1 : 0;
        }
      }
      if (!cell.completed) {
        continue;
      }
      const auto& series = cell.metrics.rmse_series;
      if (series.size() > rmse_sum.size()) {
        rmse_sum.resize(series.size(), 0.0);
        rmse_count.resize(series.size(), 0);
      }
      for (std::size_t k = 0; k < series.size(); ++k) {
        rmse_sum[k] += series[k];
        ++rmse_count[k];
      }
      final_sum += cell.metrics.final_rmse;
    }
    summary.mean_rmse.resize(rmse_sum.size());
    for (std::size_t k = 0; k < rmse_sum.size(); ++k) {
      summary.mean_rmse[k] = rmse_sum[k] / static_cast<double>(rmse_count[k]);
    }
    summary.mean_final_rmse =
        summary.overall.completed == 0 ? 0.0 : final_sum / static_cast<double>(summary.overall.completed);
    report.strategies.push_back(std::move(summary));
  }
  return report;
}

}  // namespace dcee
