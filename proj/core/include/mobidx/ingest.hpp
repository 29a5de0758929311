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
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mobidx/calendar.hpp"
#include "mobidx/geodesy.hpp"
#include "mobidx/regions.hpp"

namespace mobidx {

/// Location precision of an event, ordered coarse to fine.
enum class Precision : std::uint8_t { country = 0, admin = 1, city = 2, gps = 3 };

std::optional<Precision> parse_precision(std::string_view text);
std::string_view to_string(Precision p);

/// One geotagged post.
struct LocatedEvent {
  std::string user_id;
  Timestamp ts = 0;
  GeoPoint point;
  std::string country;
  std::optional<std::string> admin1;
  std::string source;
  Precision precision = Precision::gps;
};

/// Parses one record line. Returns nullopt and fills `error` (if given) when
/// the line does not satisfy the event schema.
std::optional<LocatedEvent> parse_event_line(std::string_view line, std::string* error = nullptr);

/// True for lines that carry no record: blank lines and '#' comments.
bool is_ignorable_line(std::string_view line) noexcept;

struct ParseDiagnostics {
  std::uint64_t lines = 0;
  std::uint64_t records = 0;
  std::uint64_t ignored = 0;
  std::uint64_t malformed = 0;
  /// The first few malformed lines as "line N: reason".
  std::vector<std::string> samples;

  void record_malformed(std::uint64_t line_no, std::string_view reason);
  void merge(const ParseDiagnostics& other);
};

struct ParseResult {
  std::vector<LocatedEvent> events;
  ParseDiagnostics diagnostics;
};

/// Parses a line-delimited event stream. Malformed lines are skipped and
/// counted; a stream read failure throws InputError.
ParseResult parse_events(std::istream& in);

/// Case-insensitive exact-match set of post-source labels to drop.
class SourceDenylist {
 public:
  SourceDenylist() = default;
  explicit SourceDenylist(std::span<const std::string> labels);

  /// One label per line; blank lines and '#' comments ignored.
  static SourceDenylist read(std::istream& in);

  void add(std::string_view label);
  bool contains(std::string_view source) const;
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::unordered_set<std::string> labels_;
};

struct FilterConfig {
  Precision min_precision = Precision::city;
  SourceDenylist denylist;
};

enum class FilterVerdict { keep, precision, source };

/// Precision is checked before source; an event failing both is tallied
/// under precision.
FilterVerdict classify(const LocatedEvent& event, const FilterConfig& config);

struct FilterTallies {
  std::uint64_t kept = 0;
  std::uint64_t dropped_precision = 0;
  std::uint64_t dropped_source = 0;

  void count(FilterVerdict v) noexcept;
  void merge(const FilterTallies& other) noexcept;
};

struct FilterResult {
  std::vector<LocatedEvent> events;
  FilterTallies tallies;
};

FilterResult filter_events(std::vector<LocatedEvent> events, const FilterConfig& config);

struct TrackPoint {
  Timestamp ts = 0;
  GeoPoint point;
  TagId tag = 0;
};

/// One user's time-ordered points within one calendar day.
struct UserDayTrack {
  std::string user_id;
  Date day;
  std::vector<TrackPoint> points;

  std::vector<GeoPoint> positions() const;
};

/// Orders points by timestamp; equal timestamps keep arrival order.
void sort_track_points(std::vector<TrackPoint>& points);

/// Partitions events by (user_id, calendar day) with the day boundary shifted
/// by `day_offset_hours`. Output is ordered by user_id then day; points within
/// a track by timestamp, ties in input order. Region tags are interned into
/// `regions`.
std::vector<UserDayTrack> group_user_days(std::span<const LocatedEvent> events, RegionAssigner& regions,
                                          int day_offset_hours = 0);

}  // namespace mobidx
