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

#include "dcee/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dcee/errors.hpp"

namespace dcee {

namespace {

constexpr double kMinSigma = 1e-300;
const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

// Standard normal CDF of (threshold - c) / sigma.
double below_threshold_mass(double c_model, const SensorParams& sp) noexcept {
  const double sigma = std::max(sp.detect_sigma(c_model), kMinSigma);
  const double t = (sp.threshold - c_model) / sigma;
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double above_threshold_mass(double c_model, const SensorParams& sp) noexcept {
  const double sigma = std::max(sp.detect_sigma(c_model), kMinSigma);
  const double t = (sp.threshold - c_model) / sigma;
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

}  // namespace

void validate(const SensorParams& sp) {
  if (!(sp.threshold > 0.0) || !std::isfinite(sp.threshold)) {
    throw InvalidParameter("sensor.threshold must be > 0");
  }
  if (!(sp.detect_prob >= 0.0 && sp.detect_prob <= 1.0)) {
    throw InvalidParameter("sensor.detect_prob must lie in [0, 1]");
  }
  if (!(sp.miss_model_prob >= 0.0 && sp.miss_model_prob <= 1.0)) {
    throw InvalidParameter("sensor.miss_model_prob must lie in [0, 1]");
  }
  if (!(sp.noise_std_detect >= 0.0) || !(sp.noise_ratio_detect >= 0.0) || !(sp.noise_std_nondetect >= 0.0)) {
    throw InvalidParameter("sensor noise levels must be >= 0");
  }
  if (!(sp.likelihood_floor > 0.0 && sp.likelihood_floor < 1.0)) {
    throw InvalidParameter("sensor.likelihood_floor must lie in (0, 1)");
  }
}

Measurement sample_measurement(double c_true, const SensorParams& sp, Rng& rng) {
  const double u = uniform01(rng);
  const double n = standard_normal(rng);
  double value = 0.0;
  if (c_true >= sp.threshold && u < sp.detect_prob) {
    value = c_true + sp.detect_sigma(c_true) * n;
  } else {
    value = std::abs(sp.noise_std_nondetect * n);
  }
  value = std::max(value, 0.0);
  return Measurement{value, classify_detection(value, sp), {}, 0};
}

double detection_probability(double c_model, const SensorParams& sp) noexcept {
  return sp.effective_detect_prob(c_model) * above_threshold_mass(c_model, sp);
}

double non_detection_probability(double c_model, const SensorParams& sp) noexcept {
  const double p = sp.effective_detect_prob(c_model);
  return (1.0 - p) + p * below_threshold_mass(c_model, sp);
}

double log_likelihood(double value, bool detected, double c_model, const SensorParams& sp) noexcept {
  const double log_floor = std::log(sp.likelihood_floor);
  double ll = 0.0;
  if (detected) {
    const double sigma = std::max(sp.detect_sigma(c_model), kMinSigma);
    const double r = (value - c_model) / sigma;
    ll = std::log(sp.effective_detect_prob(c_model)) - 0.5 * r * r - std::log(sigma) - kHalfLogTwoPi;
  } else {
    ll = std::log(non_detection_probability(c_model, sp));
  }
  return std::isnan(ll) ? log_floor : std::max(ll, log_floor);
}

double log_likelihood(const Measurement& m, double c_model, const SensorParams& sp) noexcept {
  return log_likelihood(m.value, m.detected, c_model, sp);
}

}  // namespace dcee
