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

#ifndef DCEE_ESTIMATOR_HPP
#define DCEE_ESTIMATOR_HPP

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dcee/dispersion.hpp"
#include "dcee/random.hpp"
#include "dcee/sensor.hpp"

namespace dcee {

/// Scalar coordinates of a SourceTerm, in storage order.
enum class Param : int {
  kSourceX = 0,
  kSourceY,
  kSourceZ,
  kReleaseRate,
  kWindSpeed,
  kWindDir,
  kDiffusivity,
  kLifetime,
};

inline constexpr std::size_t kParamCount = 8;

inline constexpr std::array<Param, kParamCount> kAllParams = {
    Param::kSourceX,   Param::kSourceY, Param::kSourceZ,     Param::kReleaseRate,
    Param::kWindSpeed, Param::kWindDir, Param::kDiffusivity, Param::kLifetime};

std::string_view param_name(Param p) noexcept;
double get_param(const SourceTerm& theta, Param p) noexcept;
void set_param(SourceTerm& theta, Param p, double value) noexcept;

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

/// Gamma(shape, scale): mean shape * scale.
struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

/// Normal(mean, variance). Samples are truncated to the parameter's admissible range.
struct Normal {
  double mean = 0.0;
  double variance = 1.0;
};

template <class Dist>
struct ParamPrior {
  Dist dist;
  bool free = true;
};

/// Prior over source terms. Parameters flagged as not free are pinned to `fixed`.
struct PriorSpec {
  ParamPrior<Uniform> source_x{{0.0, 50.0}, true};
  ParamPrior<Uniform> source_y{{0.0, 50.0}, true};
  ParamPrior<Uniform> source_z{{0.0, 8.0}, true};
  ParamPrior<Gamma> release_rate{{2.0, 5.0}, true};
  ParamPrior<Normal> wind_speed{{4.0, 2.0}, false};
  ParamPrior<Normal> wind_dir{{0.0, deg_to_rad(1.0) * deg_to_rad(1.0) * 10.0}, false};
  ParamPrior<Normal> diffusivity{{1.0, 2.0}, false};
  ParamPrior<Normal> particle_lifetime{{8.0, 2.0}, false};
  SourceTerm fixed;

  [[nodiscard]] bool is_free(Param p) const noexcept;
  [[nodiscard]] std::vector<Param> free_params() const;

  /// Log prior density over the free parameters (fixed ones must equal `fixed`).
  /// Returns -infinity outside the support.
  [[nodiscard]] double log_density(const SourceTerm& theta) const noexcept;

  /// Prior variance of one parameter, used to scale MCMC regularization.
  [[nodiscard]] double variance(Param p) const noexcept;
};

/// Throws ConfigError naming the offending `prior.<param>.<field>`.
void validate(const PriorSpec& spec);

/// Weighted hypotheses over the source term.
struct ParticleSet {
  std::vector<SourceTerm> particles;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return particles.size(); }
};

/// Throws InvalidParameter unless sizes agree, weights are non-negative and sum to one.
void validate(const ParticleSet& ps, double tolerance = 1e-9);

/// Measurements collected so far, in time order.
class MeasurementHistory {
 public:
  /// Throws InvalidParameter unless `m.time_index` exceeds the previous one.
  void push_back(const Measurement& m);

  [[nodiscard]] const std::vector<Measurement>& measurements() const noexcept { return items_; }
  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }

 private:
  std::vector<Measurement> items_;
};

ParticleSet sample_prior(const PriorSpec& spec, std::size_t n, Rng& rng);

struct UpdateResult {
  ParticleSet posterior;
  double log_evidence = 0.0;  ///< log p(z_k | Z_{k-1}) under the particle approximation
};

/// Reweights `ps` by the likelihood of `m` (bootstrap proposal: particles are unchanged).
/// Weights are normalized by a sequential left-to-right sum. Throws DegeneratePosterior
/// (carrying `m.time_index`) when every weighted particle sits at the likelihood floor.
UpdateResult bayes_update(const ParticleSet& ps, const Measurement& m, const SensorParams& sp);

/// 1 / sum(w^2).
double effective_sample_size(const ParticleSet& ps) noexcept;

/// Systematic (single-offset) resampling; output weights are uniform.
ParticleSet systematic_resample(const ParticleSet& ps, Rng& rng);

struct McmcConfig {
  int proposals_per_particle = 3;
  double proposal_scale = 0.2;
  /// Added to the empirical covariance as this fraction of each free parameter's prior variance,
  /// so a collapsed particle cloud can still spread.
  double regularization = 1e-4;
};

struct MoveResult {
  ParticleSet particles;
  double acceptance_rate = 0.0;
};

/// Random-walk Metropolis-Hastings rejuvenation against the full-history posterior.
MoveResult mcmc_move(const ParticleSet& ps, const MeasurementHistory& history, const PriorSpec& spec,
                     const SensorParams& sp, Rng& rng, const McmcConfig& config = {});

/// Sum of log-likelihoods of every measurement in `history` under `theta`.
double history_log_likelihood(const SourceTerm& theta, const MeasurementHistory& history,
                              const SensorParams& sp);

/// Weighted mean of every parameter; wind direction uses the circular mean.
SourceTerm posterior_mean(const ParticleSet& ps);

/// E[|s - mean(s)|^2] over the source position marginal.
double spatial_covariance_trace(const ParticleSet& ps) noexcept;

/// Weighted covariance of all parameters (wind direction deviations wrapped to (-pi, pi]).
Eigen::Matrix<double, kParamCount, kParamCount> parameter_covariance(const ParticleSet& ps);

}  // namespace dcee

#endif  // DCEE_ESTIMATOR_HPP
