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

#include "mobidx/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <utility>

#include <json.hpp>

#include "mobidx/error.hpp"

namespace mobidx {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxDiagnosticSamples = 20;

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool fail(std::string* error, const char* reason) {
  if (error) *error = reason;
  return false;
}

bool read_string(const json& obj, const char* key, std::string& out, std::string* error) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fail(error, "missing field");
  if (!it->is_string()) return fail(error, "field is not a string");
  out = it->get_ref<const std::string&>();
  return true;
}

bool read_number(const json& obj, const char* key, double& out, std::string* error) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fail(error, "missing field");
  if (!it->is_number()) return fail(error, "field is not a number");
  out = it->get<double>();
  return true;
}

}  // namespace

std::optional<Precision> parse_precision(std::string_view text) {
  if (text == "gps") return Precision::gps;
  if (text == "city") return Precision::city;
  if (text == "admin") return Precision::admin;
  if (text == "country") return Precision::country;
  return std::nullopt;
}

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::gps: return "gps";
    case Precision::city: return "city";
    case Precision::admin: return "admin";
    case Precision::country: return "country";
  }
  return "?";
}

bool is_ignorable_line(std::string_view line) noexcept {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::optional<LocatedEvent> parse_event_line(std::string_view line, std::string* error) {
  const json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    fail(error, "not a JSON object");
    return std::nullopt;
  }
  LocatedEvent ev;
  std::string ts_text, precision_text;
  std::string field_error;
  auto field = [&](const char* key, bool ok) {
    if (!ok && error) *error = std::string(key) + ": " + field_error;
    return ok;
  };
  if (!field("user_id", read_string(obj, "user_id", ev.user_id, &field_error)) ||
      !field("ts", read_string(obj, "ts", ts_text, &field_error)) ||
      !field("lat", read_number(obj, "lat", ev.point.lat, &field_error)) ||
      !field("lon", read_number(obj, "lon", ev.point.lon, &field_error)) ||
      !field("country", read_string(obj, "country", ev.country, &field_error)) ||
      !field("source", read_string(obj, "source", ev.source, &field_error)) ||
      !field("precision", read_string(obj, "precision", precision_text, &field_error))) {
    return std::nullopt;
  }
  if (ev.user_id.empty()) {
    fail(error, "user_id: empty");
    return std::nullopt;
  }
  const auto ts = parse_timestamp(ts_text);
  if (!ts) {
    fail(error, "ts: not an ISO-8601 instant");
    return std::nullopt;
  }
  ev.ts = *ts;
  if (!is_valid(ev.point)) {
    fail(error, "lat/lon: out of range");
    return std::nullopt;
  }
  const auto precision = parse_precision(precision_text);
  if (!precision) {
    fail(error, "precision: unknown value");
    return std::nullopt;
  }
  ev.precision = *precision;
  if (const auto it = obj.find("admin1"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      fail(error, "admin1: not a string or null");
      return std::nullopt;
    }
    if (!it->get_ref<const std::string&>().empty()) ev.admin1 = it->get<std::string>();
  }
  return ev;
}

void ParseDiagnostics::record_malformed(std::uint64_t line_no, std::string_view reason) {
  ++malformed;
  if (samples.size() < kMaxDiagnosticSamples) {
    samples.push_back("line " + std::to_string(line_no) + ": " + std::string(reason));
  }
}

void ParseDiagnostics::merge(const ParseDiagnostics& other) {
  lines += other.lines;
  records += other.records;
  ignored += other.ignored;
  malformed += other.malformed;
  for (const auto& s : other.samples) {
    if (samples.size() >= kMaxDiagnosticSamples) break;
    samples.push_back(s);
  }
}

ParseResult parse_events(std::istream& in) {
  if (!in) throw InputError("event stream is not readable");
  ParseResult result;
  std::string line;
  std::string error;
  while (std::getline(in, line)) {
    auto& diag = result.diagnostics;
    ++diag.lines;
    if (is_ignorable_line(line)) {
      ++diag.ignored;
      continue;
    }
    if (auto ev = parse_event_line(line, &error)) {
      ++diag.records;
      result.events.push_back(std::move(*ev));
    } else {
      diag.record_malformed(diag.lines, error);
    }
  }
  if (in.bad()) throw InputError("failed reading event stream");
  return result;
}

SourceDenylist::SourceDenylist(std::span<const std::string> labels) {
  for (const auto& l : labels) add(l);
}

SourceDenylist SourceDenylist::read(std::istream& in) {
  SourceDenylist list;
  std::string line;
  while (std::getline(in, line)) {
    if (is_ignorable_line(line)) continue;
    list.add(trim(line));
  }
  if (in.bad()) throw InputError("failed reading source denylist");
  return list;
}

void SourceDenylist::add(std::string_view label) { labels_.insert(lowercase(label)); }

bool SourceDenylist::contains(std::string_view source) const {
  return !labels_.empty() && labels_.contains(lowercase(source));
}

FilterVerdict classify(const LocatedEvent& event, const FilterConfig& config) {
  if (event.precision < config.min_precision) return FilterVerdict::precision;
  if (config.denylist.contains(event.source)) return FilterVerdict::source;
  return FilterVerdict::keep;
}

void FilterTallies::count(FilterVerdict v) noexcept {
  switch (v) {
    case FilterVerdict::keep: ++kept; break;
    case FilterVerdict::precision: ++dropped_precision; break;
    case FilterVerdict::source: ++dropped_source; break;
  }
}

void FilterTallies::merge(const FilterTallies& other) noexcept {
  kept += other.kept;
  dropped_precision += other.dropped_precision;
  dropped_source += other.dropped_source;
}

FilterResult filter_events(std::vector<LocatedEvent> events, const FilterConfig& config) {
  FilterResult result;
  for (auto& ev : events) {
    const auto verdict = classify(ev, config);
    result.tallies.count(verdict);
    if (verdict == FilterVerdict::keep) result.events.push_back(std::move(ev));
  }
  return result;
}

std::vector<GeoPoint> UserDayTrack::positions() const {
  std::vector<GeoPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.point);
  return out;
}

void sort_track_points(std::vector<TrackPoint>& points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const TrackPoint& a, const TrackPoint& b) { return a.ts < b.ts; });
}

std::vector<UserDayTrack> group_user_days(std::span<const LocatedEvent> events, RegionAssigner& regions,
                                          int day_offset_hours) {
  std::map<std::pair<std::string_view, Date>, std::vector<TrackPoint>> groups;
  for (const auto& ev : events) {
    const TagId tag = regions.intern_tags(ev.country, ev.admin1.value_or(std::string{}));
    groups[{ev.user_id, day_of(ev.ts, day_offset_hours)}].push_back({ev.ts, ev.point, tag});
  }
  std::vector<UserDayTrack> tracks;
  tracks.reserve(groups.size());
  for (auto& [key, points] : groups) {
    sort_track_points(points);
    tracks.push_back({std::string(key.first), key.second, std::move(points)});
  }
  return tracks;
}

}  // namespace mobidx
