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

#include "dcee/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include <Eigen/Cholesky>

#include "dcee/errors.hpp"

namespace dcee {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Signed angular difference a - b wrapped to (-pi, pi].
double angle_diff(double a, double b) noexcept {
  double d = std::remainder(a - b, 2.0 * std::numbers::pi);
  return d <= -std::numbers::pi ? d + 2.0 * std::numbers::pi : d;
}

bool within_support(Param p, double v) noexcept {
  switch (p) {
    case Param::kReleaseRate:
    case Param::kDiffusivity:
    case Param::kLifetime:
      return v > 0.0;
    case Param::kWindSpeed:
      return v >= 0.0;
    default:
      return true;
  }
}

double log_normal_kernel(const Normal& n, double v, bool angular) noexcept {
  const double d = angular ? angle_diff(v, n.mean) : v - n.mean;
  return -0.5 * d * d / n.variance - 0.5 * std::log(2.0 * std::numbers::pi * n.variance);
}

double sample_truncated_normal(const Normal& n, Param p, Rng& rng) {
  const double sd = std::sqrt(n.variance);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double v = n.mean + sd * standard_normal(rng);
    if (within_support(p, v)) {
      return v;
    }
  }
  throw ConfigError(std::string("prior.") + std::string(param_name(p)),
                    "normal prior has negligible mass on the admissible range");
}

// Non-detections at one exact position share a likelihood, so the history is evaluated per
// visited position rather than per measurement.
struct HistoryGroup {
  Position position;
  int non_detections = 0;
  std::vector<double> detections;
};

std::vector<HistoryGroup> group_history(const MeasurementHistory& history) {
  std::vector<HistoryGroup> groups;
  std::map<std::tuple<double, double, double>, std::size_t> index;
  for (const auto& m : history.measurements()) {
    const auto key = std::make_tuple(m.position.x, m.position.y, m.position.z);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back(HistoryGroup{m.position, 0, {}});
    }
    auto& g = groups[it->second];
    if (m.detected) {
      g.detections.push_back(m.value);
    } else {
      ++g.non_detections;
    }
  }
  return groups;
}

double grouped_log_likelihood(const SourceTerm& theta, const std::vector<HistoryGroup>& groups,
                              const SensorParams& sp) {
  double total = 0.0;
  for (const auto& g : groups) {
    const double c = concentration(g.position, theta);
    if (g.non_detections > 0) {
      total += g.non_detections * log_likelihood(0.0, false, c, sp);
    }
    for (const double v : g.detections) {
      total += log_likelihood(v, true, c, sp);
    }
  }
  return total;
}

}  // namespace

std::string_view param_name(Param p) noexcept {
  switch (p) {
    case Param::kSourceX:
      return "source_x";
    case Param::kSourceY:
      return "source_y";
    case Param::kSourceZ:
      return "source_z";
    case Param::kReleaseRate:
      return "release_rate";
    case Param::kWindSpeed:
      return "wind_speed";
    case Param::kWindDir:
      return "wind_dir";
    case Param::kDiffusivity:
      return "diffusivity";
    case Param::kLifetime:
      return "particle_lifetime";
  }
  return "unknown";
}

double get_param(const SourceTerm& theta, Param p) noexcept {
  switch (p) {
    case Param::kSourceX:
      return theta.source.x;
    case Param::kSourceY:
      return theta.source.y;
    case Param::kSourceZ:
      return theta.source.z;
    case Param::kReleaseRate:
      return theta.release_rate;
    case Param::kWindSpeed:
      return theta.wind_speed;
    case Param::kWindDir:
      return theta.wind_dir;
    case Param::kDiffusivity:
      return theta.diffusivity;
    case Param::kLifetime:
      return theta.particle_lifetime;
  }
  return 0.0;
}

void set_param(SourceTerm& theta, Param p, double value) noexcept {
  switch (p) {
    case Param::kSourceX:
      theta.source.x = value;
      break;
    case Param::kSourceY:
      theta.source.y = value;
      break;
    case Param::kSourceZ:
      theta.source.z = value;
      break;
    case Param::kReleaseRate:
      theta.release_rate = value;
      break;
    case Param::kWindSpeed:
      theta.wind_speed = value;
      break;
    case Param::kWindDir:
      theta.wind_dir = normalize_angle(value);
      break;
    case Param::kDiffusivity:
      theta.diffusivity = value;
      break;
    case Param::kLifetime:
      theta.particle_lifetime = value;
      break;
  }
}

bool PriorSpec::is_free(Param p) const noexcept {
  switch (p) {
    case Param::kSourceX:
      return source_x.free;
    case Param::kSourceY:
      return source_y.free;
    case Param::kSourceZ:
      return source_z.free;
    case Param::kReleaseRate:
      return release_rate.free;
    case Param::kWindSpeed:
      return wind_speed.free;
    case Param::kWindDir:
      return wind_dir.free;
    case Param::kDiffusivity:
      return diffusivity.free;
    case Param::kLifetime:
      return particle_lifetime.free;
  }
  return false;
}

std::vector<Param> PriorSpec::free_params() const {
  std::vector<Param> out;
  for (const auto p : kAllParams) {
    if (is_free(p)) {
      out.push_back(p);
    }
  }
  return out;
}

double PriorSpec::log_density(const SourceTerm& theta) const noexcept {
  double lp = 0.0;
  const auto uniform = [&](const ParamPrior<Uniform>& u, double v) {
    if (!u.free) {
      return;
    }
    lp += (v >= u.dist.lo && v <= u.dist.hi) ? -std::log(u.dist.hi - u.dist.lo) : kNegInf;
  };
  const auto normal = [&](const ParamPrior<Normal>& n, Param p, double v) {
    if (!n.free) {
      return;
    }
    lp += within_support(p, v) ? log_normal_kernel(n.dist, v, p == Param::kWindDir) : kNegInf;
  };
  uniform(source_x, theta.source.x);
  uniform(source_y, theta.source.y);
  uniform(source_z, theta.source.z);
  if (release_rate.free) {
    const double q = theta.release_rate;
    const auto& g = release_rate.dist;
    lp += q > 0.0 ? (g.shape - 1.0) * std::log(q) - q / g.scale - std::lgamma(g.shape) - g.shape * std::log(g.scale)
                  : kNegInf;
  }
  normal(wind_speed, Param::kWindSpeed, theta.wind_speed);
  normal(wind_dir, Param::kWindDir, theta.wind_dir);
  normal(diffusivity, Param::kDiffusivity, theta.diffusivity);
  normal(particle_lifetime, Param::kLifetime, theta.particle_lifetime);
  return std::isnan(lp) ? kNegInf : lp;
}

double PriorSpec::variance(Param p) const noexcept {
  const auto uvar = [](const Uniform& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; };
  switch (p) {
    case Param::kSourceX:
      return uvar(source_x.dist);
    case Param::kSourceY:
      return uvar(source_y.dist);
    case Param::kSourceZ:
      return uvar(source_z.dist);
    case Param::kReleaseRate:
      return release_rate.dist.shape * release_rate.dist.scale * release_rate.dist.scale;
    case Param::kWindSpeed:
      return wind_speed.dist.variance;
    case Param::kWindDir:
      return wind_dir.dist.variance;
    case Param::kDiffusivity:
      return diffusivity.dist.variance;
    case Param::kLifetime:
      return particle_lifetime.dist.variance;
  }
  return 0.0;
}

void validate(const PriorSpec& spec) {
  const auto uniform = [](const ParamPrior<Uniform>& u, const char* name) {
    if (!(std::isfinite(u.dist.lo) && std::isfinite(u.dist.hi) && u.dist.lo < u.dist.hi)) {
      throw ConfigError(std::string("prior.") + name + ".lo", "uniform prior requires lo < hi");
    }
  };
  const auto normal = [](const ParamPrior<Normal>& n, const char* name) {
    if (!std::isfinite(n.dist.mean)) {
      throw ConfigError(std::string("prior.") + name + ".mean", "must be finite");
    }
    if (!(n.dist.variance > 0.0) || !std::isfinite(n.dist.variance)) {
      throw ConfigError(std::string("prior.") + name + ".variance", "must be > 0");
    }
  };
  uniform(spec.source_x, "source_x");
  uniform(spec.source_y, "source_y");
  uniform(spec.source_z, "source_z");
  if (!(spec.release_rate.dist.shape > 0.0) || !std::isfinite(spec.release_rate.dist.shape)) {
    throw ConfigError("prior.release_rate.shape", "gamma shape must be > 0");
  }
  if (!(spec.release_rate.dist.scale > 0.0) || !std::isfinite(spec.release_rate.dist.scale)) {
    throw ConfigError("prior.release_rate.scale", "gamma scale must be > 0");
  }
  normal(spec.wind_speed, "wind_speed");
  normal(spec.wind_dir, "wind_dir");
  normal(spec.diffusivity, "diffusivity");
  normal(spec.particle_lifetime, "particle_lifetime");
  try {
    validate(spec.fixed);
  } catch (const InvalidParameter& e) {
    throw ConfigError("prior.fixed", e.what());
  }
}

void validate(const ParticleSet& ps, double tolerance) {
  if (ps.particles.size() != ps.weights.size()) {
    throw InvalidParameter("particle and weight counts differ");
  }
  if (ps.particles.empty()) {
    throw InvalidParameter("particle set is empty");
  }
  double sum = 0.0;
  for (const double w : ps.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidParameter("weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw InvalidParameter("weights do not sum to one");
  }
}

void MeasurementHistory::push_back(const Measurement& m) {
  if (!items_.empty() && m.time_index <= items_.back().time_index) {
    throw InvalidParameter("measurement time indices must be strictly increasing");
  }
  items_.push_back(m);
}

ParticleSet sample_prior(const PriorSpec& spec, std::size_t n, Rng& rng) {
  validate(spec);
  if (n < 2) {
    throw ConfigError("particle_count", "at least two particles are required");
  }
  ParticleSet ps;
  ps.particles.reserve(n);
  std::gamma_distribution<double> gamma(spec.release_rate.dist.shape, spec.release_rate.dist.scale);
  const auto uniform = [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * uniform01(rng); };
  for (std::size_t i = 0; i < n; ++i) {
    SourceTerm theta = spec.fixed;
    if (spec.source_x.free) theta.source.x = uniform(spec.source_x.dist);
    if (spec.source_y.free) theta.source.y = uniform(spec.source_y.dist);
    if (spec.source_z.free) theta.source.z = uniform(spec.source_z.dist);
    if (spec.release_rate.free) {
      do {
        theta.release_rate = gamma(rng);
      } while (!(theta.release_rate > 0.0));
    }
    if (spec.wind_speed.free) theta.wind_speed = sample_truncated_normal(spec.wind_speed.dist, Param::kWindSpeed, rng);
    if (spec.wind_dir.free) {
      theta.wind_dir = normalize_angle(sample_truncated_normal(spec.wind_dir.dist, Param::kWindDir, rng));
    }
    if (spec.diffusivity.free) {
      theta.diffusivity = sample_truncated_normal(spec.diffusivity.dist, Param::kDiffusivity, rng);
    }
    if (spec.particle_lifetime.free) {
      theta.particle_lifetime = sample_truncated_normal(spec.particle_lifetime.dist, Param::kLifetime, rng);
    }
    ps.particles.push_back(theta);
  }
  ps.weights.assign(n, 1.0 / static_cast<double>(n));
  return ps;
}

UpdateResult bayes_update(const ParticleSet& ps, const Measurement& m, const SensorParams& sp) {
  const std::size_t n = ps.size();
  const double log_floor = std::log(sp.likelihood_floor);
  std::vector<double> log_w(n);
  double max_log_w = kNegInf;
  double max_ll = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (ps.weights[i] <= 0.0) {
      log_w[i] = kNegInf;
      continue;
    }
    const double ll = log_likelihood(m, concentration(m.position, ps.particles[i]), sp);
    max_ll = std::max(max_ll, ll);
    log_w[i] = std::log(ps.weights[i]) + ll;
    max_log_w = std::max(max_log_w, log_w[i]);
  }
  if (max_ll <= log_floor) {
    throw DegeneratePosterior(m.time_index);
  }
  UpdateResult result;
  result.posterior.particles = ps.particles;
  result.posterior.weights.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(log_w[i] - max_log_w);
    result.posterior.weights[i] = w;
    sum += w;
  }
  for (auto& w : result.posterior.weights) {
    w /= sum;
  }
  result.log_evidence = max_log_w + std::log(sum);
  return result;
}

double effective_sample_size(const ParticleSet& ps) noexcept {
  double sum_sq = 0.0;
  for (const double w : ps.weights) {
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

ParticleSet systematic_resample(const ParticleSet& ps, Rng& rng) {
  const std::size_t n = ps.size();
  ParticleSet out;
  out.particles.reserve(n);
  // Pointers k + u live on [0, n); the cumulative weights are scaled to match.
  const double offset = uniform01(rng);
  const double scale = static_cast<double>(n);
  double cumulative = ps.weights[0] * scale;
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pointer = static_cast<double>(k) + offset;
    while (pointer >= cumulative && i + 1 < n) {
      ++i;
      cumulative += ps.weights[i] * scale;
    }
    out.particles.push_back(ps.particles[i]);
  }
  out.weights.assign(n, 1.0 / scale);
  return out;
}

double history_log_likelihood(const SourceTerm& theta, const MeasurementHistory& history,
                              const SensorParams& sp) {
  double total = 0.0;
  for (const auto& m : history.measurements()) {
    total += log_likelihood(m, concentration(m.position, theta), sp);
  }
  return total;
}

MoveResult mcmc_move(const ParticleSet& ps, const MeasurementHistory& history, const PriorSpec& spec,
                     const SensorParams& sp, Rng& rng, const McmcConfig& config) {
  MoveResult result{ps, 0.0};
  const auto free = spec.free_params();
  if (history.empty() || free.empty() || config.proposals_per_particle <= 0) {
    return result;
  }
  const auto d = static_cast<Eigen::Index>(free.size());
  const auto full_cov = parameter_covariance(ps);
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      cov(a, b) = full_cov(static_cast<int>(free[a]), static_cast<int>(free[b]));
    }
    cov(a, a) += config.regularization * spec.variance(free[a]);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(d, d);
  if (llt.info() == Eigen::Success) {
    chol = llt.matrixL();
  } else {
    for (Eigen::Index a = 0; a < d; ++a) {
      chol(a, a) = std::sqrt(std::max(cov(a, a), 0.0));
    }
  }
  chol *= config.proposal_scale;

  const auto groups = group_history(history);
  const auto log_posterior = [&](const SourceTerm& theta) {
    const double lp = spec.log_density(theta);
    return lp == kNegInf ? kNegInf : lp + grouped_log_likelihood(theta, groups, sp);
  };

  std::size_t accepted = 0;
  std::size_t proposed = 0;
  Eigen::VectorXd xi(d);
  const SourceTerm* previous_input = nullptr;
  double previous_lp = 0.0;
  for (std::size_t i = 0; i < result.particles.size(); ++i) {
    SourceTerm current = result.particles.particles[i];
    // Resampled copies are contiguous; their posterior value only needs computing once.
    double lp = (previous_input != nullptr && *previous_input == ps.particles[i]) ? previous_lp : log_posterior(current);
    previous_input = &ps.particles[i];
    previous_lp = lp;
    for (int k = 0; k < config.proposals_per_particle; ++k) {
      for (Eigen::Index a = 0; a < d; ++a) {
        xi(a) = standard_normal(rng);
      }
      const double log_u = std::log(uniform01(rng));
      const Eigen::VectorXd step = chol * xi;
      SourceTerm proposal = current;
      for (Eigen::Index a = 0; a < d; ++a) {
        set_param(proposal, free[a], get_param(current, free[a]) + step(a));
      }
      ++proposed;
      const double lp_new = log_posterior(proposal);
      if (lp_new != kNegInf && log_u < lp_new - lp) {
        current = proposal;
        lp = lp_new;
        ++accepted;
      }
    }
    result.particles.particles[i] = current;
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  return result;
}

SourceTerm posterior_mean(const ParticleSet& ps) {
  std::array<double, kParamCount> sums{};
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double w = ps.weights[i];
    const auto& theta = ps.particles[i];
    for (const auto p : kAllParams) {
      sums[static_cast<std::size_t>(p)] += w * get_param(theta, p);
    }
    sin_sum += w * std::sin(theta.wind_dir);
    cos_sum += w * std::cos(theta.wind_dir);
  }
  SourceTerm mean;
  for (const auto p : kAllParams) {
    set_param(mean, p, sums[static_cast<std::size_t>(p)]);
  }
  mean.wind_dir = normalize_angle(std::atan2(sin_sum, cos_sum));
  return mean;
}

double spatial_covariance_trace(const ParticleSet& ps) noexcept {
  Position mean;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double w = ps.weights[i];
    mean.x += w * ps.particles[i].source.x;
    mean.y += w * ps.particles[i].source.y;
    mean.z += w * ps.particles[i].source.z;
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    trace += ps.weights[i] * squared_distance(ps.particles[i].source, mean);
  }
  return trace;
}

Eigen::Matrix<double, kParamCount, kParamCount> parameter_covariance(const ParticleSet& ps) {
  const SourceTerm mean = posterior_mean(ps);
  Eigen::Matrix<double, kParamCount, kParamCount> cov = Eigen::Matrix<double, kParamCount, kParamCount>::Zero();
  Eigen::Matrix<double, kParamCount, 1> dev;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (const auto p : kAllParams) {
      const double v = get_param(ps.particles[i], p);
      const double m = get_param(mean, p);
      dev(static_cast<int>(p)) = p == Param::kWindDir ? angle_diff(v, m) : v - m;
    }
    cov.noalias() += ps.weights[i] * (dev * dev.transpose());
  }
  return cov;
}

}  // namespace dcee
