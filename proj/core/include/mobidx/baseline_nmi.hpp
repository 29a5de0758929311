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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mobidx/calendar.hpp"
#include "mobidx/daily_metrics.hpp"

namespace mobidx {

enum class Metric { sd, cd };

std::string_view to_string(Metric m);

struct BaselineConfig {
  DateRange window;
  int min_users_per_day = 10;
  int min_days_per_weekday = 2;
};

/// Weekday-indexed (0 = Monday) reference distances for one region and metric.
struct BaselineTable {
  std::string region_id;
  Metric metric = Metric::sd;
  std::array<std::optional<double>, 7> values{};
  std::array<int, 7> support{};

  bool complete() const;
  std::vector<int> missing_weekdays() const;
};

/// Daily mean and user count of `metric` in a row, if present.
std::optional<double> daily_mean(const DailyRegionMetrics& row, Metric metric);
std::int64_t daily_count(const DailyRegionMetrics& row, Metric metric);

/// Baseline for one region. `daily` holds that region's rows (any order, any
/// dates; rows outside the window are ignored).
///
/// A weekday's baseline is the mean of the daily means over window days on
/// that weekday with at least min_users_per_day users. Weekdays with fewer
/// than min_days_per_weekday such days, or whose baseline would be zero, get
/// no value. Throws ConfigError for an empty window or thresholds below 1.
BaselineTable compute_baseline(std::string_view region_id, Metric metric,
                               std::span<const DailyRegionMetrics> daily, const BaselineConfig& config);

/// Tables for every (region, metric) present in `daily`, in region order of
/// first appearance, sd before cd.
std::vector<BaselineTable> compute_baselines(std::span<const DailyRegionMetrics> daily,
                                             const BaselineConfig& config);

struct NmiSample {
  Date date;
  double value = 0;
  std::int64_t n_users = 0;
};

struct NmiSeries {
  std::string region_id;
  Metric metric = Metric::sd;
  std::vector<NmiSample> samples;  // strictly increasing dates
};

/// Raw NMI over `window`: daily mean over the weekday baseline. Days without a
/// mean are gaps. Throws ExcludedRegion when the table is incomplete.
NmiSeries normalize(std::span<const DailyRegionMetrics> daily, const BaselineTable& table,
                    const DateRange& window);

}  // namespace mobidx
