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

#ifndef DCEE_DISPERSION_HPP
#define DCEE_DISPERSION_HPP

#include <cmath>
#include <numbers>

namespace dcee {

/// Cartesian position in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Position operator+(const Position& a, const Position& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Position operator-(const Position& a, const Position& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend bool operator==(const Position&, const Position&) = default;

  [[nodiscard]] double squared_norm() const noexcept { return x * x + y * y + z * z; }
  [[nodiscard]] double norm() const noexcept { return std::sqrt(squared_norm()); }
  [[nodiscard]] bool is_finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double squared_distance(const Position& a, const Position& b) noexcept { return (a - b).squared_norm(); }

/// Parameters of a single continuous point release and its local environment.
///
/// `wind_dir` is the angle appearing in the plume exponents. With the exponent signs used by
/// `concentration`, the plume trails from the source towards `wind_dir + pi`: for `wind_dir = 0`
/// concentrations decay slowly along -x and quickly along +x.
struct SourceTerm {
  Position source;
  double release_rate = 5.0;       ///< g/s
  double wind_speed = 4.0;         ///< m/s
  double wind_dir = 0.0;           ///< radians in [0, 2 pi)
  double diffusivity = 1.0;        ///< m^2/s
  double particle_lifetime = 8.0;  ///< s

  friend bool operator==(const SourceTerm&, const SourceTerm&) = default;
};

struct Interval {
  double min = 0.0;
  double max = 0.0;

  [[nodiscard]] bool contains(double v) const noexcept { return v >= min && v <= max; }
  [[nodiscard]] double width() const noexcept { return max - min; }
  [[nodiscard]] double clamp(double v) const noexcept { return v < min ? min : (v > max ? max : v); }
};

/// Axis-aligned search volume.
struct DomainBounds {
  Interval x{0.0, 50.0};
  Interval y{0.0, 50.0};
  Interval z{0.0, 8.0};

  [[nodiscard]] bool contains(const Position& p) const noexcept {
    return x.contains(p.x) && y.contains(p.y) && z.contains(p.z);
  }
  [[nodiscard]] Position center() const noexcept {
    return {0.5 * (x.min + x.max), 0.5 * (y.min + y.max), 0.5 * (z.min + z.max)};
  }
};

/// Distances to the source below this are clamped inside `concentration`.
inline constexpr double kMinSourceDistance = 0.1;

/// Maps any angle onto [0, 2 pi).
double normalize_angle(double radians) noexcept;

/// Throws InvalidParameter unless release rate, diffusivity and lifetime are strictly positive,
/// wind speed is non-negative and every field is finite.
void validate(const SourceTerm& theta);

/// Throws InvalidParameter unless min < max on every axis.
void validate(const DomainBounds& bounds);

/// Characteristic decay length of the plume, in meters.
double plume_lambda(const SourceTerm& theta);

/// Expected steady-state concentration (g/m^3) at `p`.
double concentration(const Position& p, const SourceTerm& theta);

/// Clamps each coordinate of `p` into `bounds`.
Position clip_to_bounds(const Position& p, const DomainBounds& bounds) noexcept;

inline constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

}  // namespace dcee

#endif  // DCEE_DISPERSION_HPP
