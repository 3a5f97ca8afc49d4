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

#ifndef DCEE_SENSOR_HPP
#define DCEE_SENSOR_HPP

#include "dcee/dispersion.hpp"
#include "dcee/random.hpp"

namespace dcee {

/// Gas sensor characteristics.
///
/// The detection-channel noise standard deviation is `noise_std_detect + noise_ratio_detect * c`,
/// i.e. constant by default and signal-proportional when `noise_ratio_detect > 0`.
struct SensorParams {
  double threshold = 5e-4;            ///< g/m^3; readings at or above it count as detections
  double detect_prob = 0.7;           ///< probability that a supra-threshold plume is registered
  double noise_std_detect = 5e-5;     ///< g/m^3
  double noise_ratio_detect = 0.0;    ///< dimensionless
  double noise_std_nondetect = 5e-5;  ///< g/m^3, background reading spread
  double miss_model_prob = 0.1;       ///< registration probability assumed for sub-threshold model values
  double likelihood_floor = 1e-300;

  /// Detection-channel noise standard deviation at model concentration `c`.
  [[nodiscard]] double detect_sigma(double c) const noexcept { return noise_std_detect + noise_ratio_detect * c; }

  /// Registration probability used by the likelihood.
  [[nodiscard]] double effective_detect_prob(double c) const noexcept {
    return c >= threshold ? detect_prob : miss_model_prob;
  }
};

/// Throws InvalidParameter on out-of-range sensor settings.
void validate(const SensorParams& sp);

/// One concentration reading and where it was taken.
struct Measurement {
  double value = 0.0;
  bool detected = false;
  Position position;
  int time_index = 0;
};

/// True iff `value` reaches the detection threshold.
[[nodiscard]] inline bool classify_detection(double value, const SensorParams& sp) noexcept {
  return value >= sp.threshold;
}

/// Draws one sensor reading given the true concentration at the sensor.
///
/// Exactly one uniform and one normal variate are consumed per call, whatever branch is taken,
/// so that streams stay aligned when the same generator state is replayed for different inputs.
Measurement sample_measurement(double c_true, const SensorParams& sp, Rng& rng);

/// Probability that a reading at model concentration `c_model` is classified as a detection.
double detection_probability(double c_model, const SensorParams& sp) noexcept;

/// Complement of detection_probability, computed on its own to keep the tail accurate.
double non_detection_probability(double c_model, const SensorParams& sp) noexcept;

/// log p(m | c_model). Always finite: floored at log(sp.likelihood_floor).
double log_likelihood(const Measurement& m, double c_model, const SensorParams& sp) noexcept;

/// Same as log_likelihood but for a bare (value, detected) pair.
double log_likelihood(double value, bool detected, double c_model, const SensorParams& sp) noexcept;

}  // namespace dcee

#endif  // DCEE_SENSOR_HPP
