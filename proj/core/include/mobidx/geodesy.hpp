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

#pragma once

#include <span>

namespace mobidx {

/// IUGG mean Earth radius. The sphere is the only Earth model used.
inline constexpr double kEarthMeanRadiusKm = 6371.0088;

/// Position in decimal degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// True iff both coordinates are finite, lat in [-90, 90] and lon in [-180, 180].
bool is_valid(GeoPoint p) noexcept;

/// Throws InvalidInput if `p` is not a valid position.
void validate(GeoPoint p);

/// Great-circle distance in kilometers on the mean-radius sphere.
///
/// Uses the haversine form evaluated through atan2, which keeps full relative
/// precision for the near-zero displacements that dominate daily tracks and
/// stays well conditioned near antipodes. Throws InvalidInput on invalid points.
double great_circle_distance(GeoPoint a, GeoPoint b);

/// Arithmetic mean of latitudes and of longitudes, in degrees.
///
/// This is the literal coordinate average; tracks that straddle the
/// antimeridian get a center on the far side of the globe. Callers that care
/// can detect such tracks with straddles_antimeridian().
GeoPoint mean_center(std::span<const GeoPoint> points);

/// True when the longitudes in `points` span more than 180 degrees, i.e. the
/// shortest path between some pair crosses the antimeridian.
bool straddles_antimeridian(std::span<const GeoPoint> points) noexcept;

}  // namespace mobidx
