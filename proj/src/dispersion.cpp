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

#include "dcee/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "dcee/errors.hpp"

namespace dcee {

double normalize_angle(double radians) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, kTwoPi);
  if (a < 0.0) {
    a += kTwoPi;
  }
  // fmod of a tiny negative value can round back up to 2 pi.
  return a >= kTwoPi ? 0.0 : a;
}

void validate(const SourceTerm& theta) {
  if (!theta.source.is_finite() || !std::isfinite(theta.release_rate) || !std::isfinite(theta.wind_speed) ||
      !std::isfinite(theta.wind_dir) || !std::isfinite(theta.diffusivity) ||
      !std::isfinite(theta.particle_lifetime)) {
    throw InvalidParameter("source term has non-finite fields");
  }
  if (theta.release_rate <= 0.0) {
    throw InvalidParameter("release_rate must be > 0");
  }
  if (theta.wind_speed < 0.0) {
    throw InvalidParameter("wind_speed must be >= 0");
  }
  if (theta.diffusivity <= 0.0) {
    throw InvalidParameter("diffusivity must be > 0");
  }
  if (theta.particle_lifetime <= 0.0) {
    throw InvalidParameter("particle_lifetime must be > 0");
  }
}

void validate(const DomainBounds& bounds) {
  const auto check = [](const Interval& i, const char* axis) {
    if (!(std::isfinite(i.min) && std::isfinite(i.max) && i.min < i.max)) {
      throw InvalidParameter(std::string("bounds.") + axis + ": min must be < max");
    }
  };
  check(bounds.x, "x");
  check(bounds.y, "y");
  check(bounds.z, "z");
}

double plume_lambda(const SourceTerm& theta) {
  const double d = theta.diffusivity;
  const double tau = theta.particle_lifetime;
  const double u = theta.wind_speed;
  const double lambda = std::sqrt(d * tau / (1.0 + (u * u * tau) / (4.0 * d)));
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw InvalidParameter("plume length scale is not finite and positive");
  }
  return lambda;
}

double concentration(const Position& p, const SourceTerm& theta) {
  const Position delta = p - theta.source;
  const double r = std::max(delta.norm(), kMinSourceDistance);
  const double d = theta.diffusivity;
  const double tau = theta.particle_lifetime;
  const double u = theta.wind_speed;
  // Inverse of plume_lambda, without the error path: this is the hot loop of every filter update.
  const double inv_lambda = std::sqrt((1.0 + (u * u * tau) / (4.0 * d)) / (d * tau));
  const double advection = (delta.x * std::cos(theta.wind_dir) + delta.y * std::sin(theta.wind_dir)) * u / (2.0 * d);
  return theta.release_rate / (4.0 * std::numbers::pi * d * r) * std::exp(-r * inv_lambda - advection);
}

Position clip_to_bounds(const Position& p, const DomainBounds& bounds) noexcept {
  return {bounds.x.clamp(p.x), bounds.y.clamp(p.y), bounds.z.clamp(p.z)};
}

}  // namespace dcee
