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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mobidx/calendar.hpp"
#include "mobidx/ingest.hpp"

namespace mobidx::synth {

/// Identifier written into generated file headers.
inline constexpr std::string_view kGeneratorId = "mt19937_64/splitmix64-v1";

struct RegionSpec {
  std::string country;
  std::optional<std::string> admin1;
  double min_lat = 0, max_lat = 0, min_lon = 0, max_lon = 0;
  double weight = 1.0;
};

struct RadiusPeriod {
  DateRange range;
  double radius_km = 0;
};

/// Scenario for the trajectory generator. Each user has a fixed home drawn
/// uniformly inside one region box; on each day they post with
/// `post_probability`, k times (k uniform in [posts_min, posts_max]), at
/// points uniform in a disc of the scheduled radius around home.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::int64_t n_users = 100;
  DateRange dates;
  std::vector<RegionSpec> regions;
  int posts_min = 1;
  int posts_max = 3;
  double post_probability = 1.0;
  double base_radius_km = 10.0;
  /// Overrides base_radius_km on the listed days; sorted, non-overlapping.
  std::vector<RadiusPeriod> radius_schedule;
  std::string source = "Twitter for Android";
  /// Fraction of users whose posts carry `bot_source`.
  double bot_fraction = 0.0;
  std::string bot_source = "AutoPoster";
  /// Fraction of posts tagged with "admin" precision.
  double coarse_fraction = 0.0;
  std::string user_prefix = "u";

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
  double radius_on(Date d) const;
};

/// Reads a JSON scenario. Keys: seed, n_users, start_date, end_date, regions
/// [{country, admin1, min_lat, max_lat, min_lon, max_lon, weight}],
/// posts_per_day {min, max}, post_probability, base_radius_km,
/// radius_schedule [{start, end, radius_km}], source, bot_fraction,
/// bot_source, coarse_fraction, user_prefix.
ScenarioConfig parse_scenario(std::string_view json_text);

/// splitmix64 finalizer, used to derive per-user and per-day seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Events in file order: day by day, users in id order, each user's posts in
/// time order. Deterministic for a fixed config.
std::vector<LocatedEvent> generate_events(const ScenarioConfig& config);

/// Writes the event file (ingest schema) with a '#' header line naming the
/// generator and seed. Writes nothing when n_users is zero.
void generate(const ScenarioConfig& config, std::ostream& out);

/// One ingest-schema JSON line, without the trailing newline.
std::string format_event_line(const LocatedEvent& event);

}  // namespace mobidx::synth
