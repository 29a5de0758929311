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

#include "mobidx/baseline_nmi.hpp"

#include <algorithm>

#include "mobidx/error.hpp"

namespace mobidx {

std::string_view to_string(Metric m) { return m == Metric::sd ? "sd" : "cd"; }

bool BaselineTable::complete() const {
  return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
}

std::vector<int> BaselineTable::missing_weekdays() const {
  std::vector<int> out;
  for (int w = 0; w < 7; ++w) {
    if (!values[w]) out.push_back(w);
  }
  return out;
}

std::optional<double> daily_mean(const DailyRegionMetrics& row, Metric metric) {
  return metric == Metric::sd ? row.mean_d_sd : row.mean_d_cd;
}

std::int64_t daily_count(const DailyRegionMetrics& row, Metric metric) {
  return metric == Metric::sd ? row.n_sd : row.n_cd;
}

BaselineTable compute_baseline(std::string_view region_id, Metric metric,
                               std::span<const DailyRegionMetrics> daily, const BaselineConfig& config) {
  if (config.window.last < config.window.first) throw ConfigError("baseline window is empty");
  if (config.min_users_per_day < 1 || config.min_days_per_weekday < 1) {
    throw ConfigError("baseline thresholds must be at least 1");
  }
  // Sum in date order so the result does not depend on row order.
  std::vector<const DailyRegionMetrics*> rows;
  for (const auto& row : daily) {
    if (row.region_id == region_id && config.window.contains(row.day)) rows.push_back(&row);
  }
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->day < b->day; });

  BaselineTable table;
  table.region_id = std::string(region_id);
  table.metric = metric;
  std::array<double, 7> sums{};
  for (const auto* row : rows) {
    const auto mean = daily_mean(*row, metric);
    if (!mean || daily_count(*row, metric) < config.min_users_per_day) continue;
    const int w = row->day.weekday();
    sums[w] += *mean;
    ++table.support[w];
  }
  for (int w = 0; w < 7; ++w) {
    if (table.support[w] < config.min_days_per_weekday) continue;
    const double value = sums[w] / table.support[w];
    if (value > 0.0) table.values[w] = value;
  }
  return table;
}

std::vector<BaselineTable> compute_baselines(std::span<const DailyRegionMetrics> daily,
                                             const BaselineConfig& config) {
  std::vector<std::string> regions;
  for (const auto& row : daily) {
    if (std::find(regions.begin(), regions.end(), row.region_id) == regions.end()) regions.push_back(row.region_id);
  }
  std::vector<BaselineTable> tables;
  for (const auto& r : regions) {
    tables.push_back(compute_baseline(r, Metric::sd, daily, config));
    tables.push_back(compute_baseline(r, Metric::cd, daily, config));
  }
  return tables;
}

NmiSeries normalize(std::span<const DailyRegionMetrics> daily, const BaselineTable& table,
                    const DateRange& window) {
  if (!table.complete()) {
    throw ExcludedRegion("incomplete baseline for " + table.region_id + " (" + std::string(to_string(table.metric)) +
                         ")");
  }
  NmiSeries series;
  series.region_id = table.region_id;
  series.metric = table.metric;
  for (const auto& row : daily) {
    if (row.region_id != table.region_id || !window.contains(row.day)) continue;
    const auto mean = daily_mean(row, table.metric);
    if (!mean) continue;
    series.samples.push_back({row.day, *mean / *table.values[row.day.weekday()], daily_count(row, table.metric)});
  }
  std::sort(series.samples.begin(), series.samples.end(),
            [](const NmiSample& a, const NmiSample& b) { return a.date < b.date; });
  const auto dup = std::adjacent_find(series.samples.begin(), series.samples.end(),
                                      [](const NmiSample& a, const NmiSample& b) { return a.date == b.date; });
  if (dup != series.samples.end()) throw InvalidInput("duplicate daily row for " + table.region_id);
  return series;
}

}  // namespace mobidx
