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

#ifndef DCEE_TESTS_ORACLES_HPP
#define DCEE_TESTS_ORACLES_HPP

// Reference implementations used by tests. They follow the model definitions directly,
// without the log-domain arithmetic, caching or sampling shortcuts of the library.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dcee/dispersion.hpp"
#include "dcee/estimator.hpp"
#include "dcee/planner.hpp"
#include "dcee/sensor.hpp"

namespace dcee::oracle {

// Written as a product of the three exponentials rather than one exponent sum.
inline double plume_concentration(const Position& p, const SourceTerm& t) {
  const double lambda = std::sqrt(t.diffusivity * t.particle_lifetime /
                                  (1.0 + t.wind_speed * t.wind_speed * t.particle_lifetime / (4.0 * t.diffusivity)));
  const double dx = p.x - t.source.x;
  const double dy = p.y - t.source.y;
  const double dz = p.z - t.source.z;
  const double r = std::max(std::hypot(dx, dy, dz), kMinSourceDistance);
  return t.release_rate / (4.0 * std::numbers::pi * t.diffusivity * r) * std::exp(-r / lambda) *
         std::exp(-dx * t.wind_speed * std::cos(t.wind_dir) / (2.0 * t.diffusivity)) *
         std::exp(-dy * t.wind_speed * std::sin(t.wind_dir) / (2.0 * t.diffusivity));
}

inline double gaussian_pdf(double x, double mean, double sigma) {
  const double r = (x - mean) / sigma;
  return std::exp(-0.5 * r * r) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double registration_prob(double c, const SensorParams& sp) {
  return c >= sp.threshold ? sp.detect_prob : sp.miss_model_prob;
}

inline double detection_density(double z, double c, const SensorParams& sp) {
  return registration_prob(c, sp) * gaussian_pdf(z, c, sp.noise_std_detect + sp.noise_ratio_detect * c);
}

inline double non_detection_mass(double c, const SensorParams& sp) {
  const double p = registration_prob(c, sp);
  const double sigma = sp.noise_std_detect + sp.noise_ratio_detect * c;
  return (1.0 - p) + p * 0.5 * (1.0 + std::erf((sp.threshold - c) / (sigma * std::numbers::sqrt2)));
}

inline double likelihood(const Measurement& m, double c, const SensorParams& sp) {
  return m.detected ? detection_density(m.value, c, sp) : non_detection_mass(c, sp);
}

// Composite Simpson rule of the detection density over [threshold, c + 14 sigma].
inline double detection_mass_by_quadrature(double c, const SensorParams& sp) {
  const double sigma = sp.noise_std_detect + sp.noise_ratio_detect * c;
  const double lo = sp.threshold;
  const double hi = std::max(lo, c) + 14.0 * sigma;
  const int n = 200000;
  const double h = (hi - lo) / n;
  double sum = detection_density(lo, c, sp) + detection_density(hi, c, sp);
  for (int i = 1; i < n; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * detection_density(lo + i * h, c, sp);
  }
  return sum * h / 3.0;
}

// Posterior over a fixed support by exhaustive products of likelihoods, renormalized per step.
inline std::vector<double> grid_posterior(const std::vector<SourceTerm>& support, const std::vector<Measurement>& ms,
                                          const SensorParams& sp) {
  std::vector<double> w(support.size(), 1.0 / static_cast<double>(support.size()));
  for (const auto& m : ms) {
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      w[i] *= likelihood(m, plume_concentration(m.position, support[i]), sp);
      total += w[i];
    }
    for (auto& v : w) {
      v /= total;
    }
  }
  return w;
}

// Expected squared distance to the source, summed particle by particle.
inline double expected_sq_distance(const ParticleSet& ps, const std::vector<double>& w, const Position& p) {
  double e = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    e += w[i] * squared_distance(p, ps.particles[i].source);
  }
  return e;
}

// Index proportional to weight by linear scan; consumes one uniform like the library sampler.
inline std::size_t draw_index(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (const double v : w) {
    total += v;
  }
  const double target = uniform01(rng) * total;
  double running = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    running += w[i];
    if (running > target) {
      return i;
    }
  }
  return w.size() - 1;
}

// Nested expectation of the terminal squared distance along `actions`, one hypothesized reading
// per stage per rollout, drawn from the same stream layout as the planner.
inline double rollout_cost(const ParticleSet& ps, const Position& p, const std::vector<Action>& actions,
                           const SensorParams& sp, int rollouts, Rng& rng) {
  double total = 0.0;
  for (int j = 0; j < rollouts; ++j) {
    std::vector<double> w = ps.weights;
    Position cursor = p;
    for (const auto& a : actions) {
      cursor = cursor + a.delta();
      const std::size_t idx = draw_index(w, rng);
      auto m = sample_measurement(dcee::concentration(cursor, ps.particles[idx]), sp, rng);
      m.position = cursor;
      double sum = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] *= likelihood(m, plume_concentration(cursor, ps.particles[i]), sp);
        sum += w[i];
      }
      for (auto& v : w) {
        v /= sum;
      }
    }
    total += expected_sq_distance(ps, w, cursor);
  }
  return total / rollouts;
}

}  // namespace dcee::oracle

#endif  // DCEE_TESTS_ORACLES_HPP
