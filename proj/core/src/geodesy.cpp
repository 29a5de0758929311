// Copyright 2026 The mobidx Authors. All Rights Reserved.
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

#include "mobidx/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mobidx/error.hpp"

namespace mobidx {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

bool is_valid(GeoPoint p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 &&
         p.lon <= 180.0;
}

void validate(GeoPoint p) {
  if (!is_valid(p)) {
    throw InvalidInput("invalid coordinate (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) + ")");
  }
}

double great_circle_distance(GeoPoint a, GeoPoint b) {
  validate(a);
  validate(b);
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double sin_dphi = std::sin((phi2 - phi1) / 2.0);
  const double sin_dlambda = std::sin((b.lon - a.lon) * kDegToRad / 2.0);
  double h = sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthMeanRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

GeoPoint mean_center(std::span<const GeoPoint> points) {
  if (points.empty()) throw InvalidInput("mean_center of an empty point set");
  // Offsets from the first point: identical inputs reproduce it bit-for-bit.
  const GeoPoint origin = points.front();
  double dlat = 0.0;
  double dlon = 0.0;
  for (const auto& p : points) {
    validate(p);
    dlat += p.lat - origin.lat;
    dlon += p.lon - origin.lon;
  }
  const auto n = static_cast<double>(points.size());
  return {origin.lat + dlat / n, origin.lon + dlon / n};
}

bool straddles_antimeridian(std::span<const GeoPoint> points) noexcept {
  if (points.empty()) return false;
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const GeoPoint& x, const GeoPoint& y) { return x.lon < y.lon; });
  return hi->lon - lo->lon > 180.0;
}

}  // namespace mobidx
