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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobidx/calendar.hpp"
#include "mobidx/geodesy.hpp"
#include "mobidx/ingest.hpp"
#include "mobidx/regions.hpp"

namespace mobidx {

/// Per user-day distances plus the anchors that decide regional membership.
struct UserDayDistances {
  std::string user_id;
  Date day;
  std::optional<double> d_sd;
  std::optional<double> d_cd;
  GeoPoint anchor_sd;  // first point of the day
  GeoPoint anchor_cd;  // mean center of the day
  TagId sd_tag = 0;
  TagId cd_tag = 0;
};

/// Per region per day means. A region/day with neither metric is never emitted.
struct DailyRegionMetrics {
  std::string region_id;
  Date day;
  std::optional<double> mean_d_sd;
  std::int64_t n_sd = 0;
  std::optional<double> mean_d_cd;
  std::int64_t n_cd = 0;
};

/// Maximum great-circle distance from the day's first point to any later
/// point; absent for single-point tracks.
std::optional<double> single_day_distance(const UserDayTrack& track);

/// Distance between the mean centers of two consecutive days of one user.
/// Throws InvalidInput on a user mismatch or non-consecutive days.
double cross_day_distance(const UserDayTrack& day_j, const UserDayTrack& day_j_plus_1);

/// Tag of the point closest in time to the midpoint between the track's first
/// and last timestamps; ties go to the earlier point.
TagId mean_center_tag(const UserDayTrack& track);

/// Distances for every track. `tracks` must be ordered by (user_id, day) as
/// produced by group_user_days().
std::vector<UserDayDistances> compute_user_distances(std::span<const UserDayTrack> tracks);

/// Running (sum, count) cells per (region, day).
///
/// Adding is order-sensitive only through floating-point summation; callers
/// that need reproducible sums add in a fixed order and merge accumulators in
/// a fixed order.
class DailyAccumulator {
 public:
  struct Cell {
    double sum_sd = 0;
    std::int64_t n_sd = 0;
    double sum_cd = 0;
    std::int64_t n_cd = 0;
  };

  void add_single_day(RegionId region, Date day, double distance);
  void add_cross_day(RegionId region, Date day, double distance);

  /// Adds a record to GLOBAL and to the region its anchors resolve to.
  void add(const UserDayDistances& record, const RegionAssigner& regions);

  void merge(const DailyAccumulator& other);

  std::vector<DailyRegionMetrics> finish(const RegionAssigner& regions) const;

  const std::map<std::pair<RegionId, Date>, Cell>& cells() const noexcept { return cells_; }

 private:
  std::map<std::pair<RegionId, Date>, Cell> cells_;
};

/// Orders rows GLOBAL first, then by region id, then by date.
void sort_daily(std::vector<DailyRegionMetrics>& rows);

std::vector<DailyRegionMetrics> aggregate_daily(std::span<const UserDayDistances> records,
                                                const RegionAssigner& regions);

}  // namespace mobidx
