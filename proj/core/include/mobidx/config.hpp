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

#include <string>
#include <string_view>
#include <vector>

#include "mobidx/calendar.hpp"
#include "mobidx/ingest.hpp"
#include "mobidx/regions.hpp"

namespace mobidx {

enum class WindowScheme { monthly, custom };
enum class Membership { tags, bbox };

/// Everything a pipeline run needs. Key names used by config files and
/// command-line flags match the field names (flags use '-' for '_').
struct RunConfig {
  std::vector<std::string> inputs;
  DateRange baseline{Date::from_ymd(2020, 1, 13), Date::from_ymd(2020, 2, 29), "baseline"};
  DateRange evaluation{Date::from_ymd(2020, 3, 1), Date::from_ymd(2020, 5, 31), "evaluation"};
  RegionLevel region_level = RegionLevel::country;
  double sigma = 2.0;
  int bridge_limit = 3;
  Precision min_precision = Precision::city;
  std::string bot_denylist;  // path; empty = no denylist
  int min_users_per_day = 10;
  int min_days_per_weekday = 2;
  WindowScheme window_scheme = WindowScheme::monthly;
  std::vector<DateRange> windows;  // custom scheme only
  std::string out = "mobidx_out";
  int day_offset_hours = 0;
  int threads = 1;
  /// Days an event may trail the latest day seen before its day is closed;
  /// -1 keeps every day open until the input ends.
  int max_lateness_days = 2;
  Membership membership = Membership::tags;
  std::string region_boxes;  // path; required for bbox membership

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  /// Windows the report is computed over: calendar months clipped to the
  /// evaluation window, or the custom list.
  std::vector<DateRange> report_windows() const;
};

/// Applies one `key = value` setting. Unknown keys and bad values throw ConfigError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Applies a flat key-value text: one `key = value` per line, '#' comments.
void apply_config_text(RunConfig& config, std::string_view text);

/// Every settable key, in documentation order.
const std::vector<std::string>& config_keys();

/// Parses "label=YYYY-MM-DD..YYYY-MM-DD" entries separated by ';'.
std::vector<DateRange> parse_windows(std::string_view text);

/// The settings that influence results, one `key = value` per line. Paths to
/// outputs and the thread count are left out so the echo is identical across
/// runs that must agree.
std::string describe(const RunConfig& config);

}  // namespace mobidx
