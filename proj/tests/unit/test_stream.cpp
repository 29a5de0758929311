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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "mobidx/daily_metrics.hpp"
#include "mobidx/error.hpp"
#include "mobidx/stream.hpp"
#include "mobidx/synth.hpp"
#include "test_support.hpp"

using namespace mobidx;

namespace {

synth::ScenarioConfig scenario() {
  synth::ScenarioConfig c;
  c.seed = 2024;
  c.n_users = 60;
  c.dates = {Date::from_ymd(2020, 2, 1), Date::from_ymd(2020, 2, 21), {}};
  c.regions = {{"US", "NY", 40, 41, -75, -73, 1.0}, {"US", "VT", 43, 44, -73, -72, 1.0}, {"FR", std::nullopt, 48, 49, 2, 3, 1.0}};
  c.posts_min = 1;
  c.posts_max = 4;
  c.post_probability = 0.7;
  c.coarse_fraction = 0.1;
  c.bot_fraction = 0.1;
  return c;
}

std::vector<std::string> lines_of(const synth::ScenarioConfig& c) {
  std::vector<std::string> lines;
  for (const auto& e : synth::generate_events(c)) lines.push_back(synth::format_event_line(e));
  return lines;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

FilterConfig filters() {
  FilterConfig f;
  f.denylist.add("autoposter");
  return f;
}

std::vector<DailyRegionMetrics> in_memory(const std::string& text, RegionLevel level) {
  std::istringstream in(text);
  auto parsed = parse_events(in);
  auto kept = filter_events(std::move(parsed.events), filters());
  RegionAssigner regions(level);
  const auto tracks = group_user_days(kept.events, regions);
  return aggregate_daily(compute_user_distances(tracks), regions);
}

std::vector<DailyRegionMetrics> streamed(const std::string& text, RegionLevel level, StreamOptions opt,
                                         StreamStats* stats = nullptr) {
  opt.filter = filters();
  RegionAssigner regions(level);
  StreamingAggregator agg(opt, regions);
  std::istringstream in(text);
  agg.consume(in);
  auto rows = agg.finish();
  if (stats) *stats = agg.stats();
  return rows;
}

void check_same(const std::vector<DailyRegionMetrics>& a, const std::vector<DailyRegionMetrics>& b, double rel) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].region_id == b[i].region_id);
    CHECK(a[i].day == b[i].day);
    CHECK(a[i].n_sd == b[i].n_sd);
    CHECK(a[i].n_cd == b[i].n_cd);
    CHECK(a[i].mean_d_sd.has_value() == b[i].mean_d_sd.has_value());
    CHECK(a[i].mean_d_cd.has_value() == b[i].mean_d_cd.has_value());
    if (a[i].mean_d_sd && b[i].mean_d_sd) CHECK(*a[i].mean_d_sd == doctest::Approx(*b[i].mean_d_sd).epsilon(rel));
    if (a[i].mean_d_cd && b[i].mean_d_cd) CHECK(*a[i].mean_d_cd == doctest::Approx(*b[i].mean_d_cd).epsilon(rel));
  }
}

bool identical(const std::vector<DailyRegionMetrics>& a, const std::vector<DailyRegionMetrics>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].region_id != b[i].region_id || a[i].day != b[i].day || a[i].n_sd != b[i].n_sd ||
        a[i].n_cd != b[i].n_cd || a[i].mean_d_sd != b[i].mean_d_sd || a[i].mean_d_cd != b[i].mean_d_cd) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("stream") {
  TEST_CASE("streaming matches the in-memory path") {
    const auto text = join(lines_of(scenario()));
    for (const auto level : {RegionLevel::global, RegionLevel::country, RegionLevel::admin1}) {
      check_same(streamed(text, level, {}), in_memory(text, level), 1e-12);
    }
  }

  TEST_CASE("threads, chunk sizes and partition counts do not change a single bit") {
    const auto text = join(lines_of(scenario()));
    StreamOptions base;
    const auto reference = streamed(text, RegionLevel::admin1, base);
    for (const unsigned threads : {2u, 3u, 8u}) {
      for (const std::size_t chunk : {std::size_t{7}, std::size_t{1000}, std::size_t{1} << 15}) {
        StreamOptions opt;
        opt.threads = threads;
        opt.chunk_lines = chunk;
        CHECK(identical(streamed(text, RegionLevel::admin1, opt), reference));
      }
    }
  }

  TEST_CASE("shuffled input with an unbounded horizon matches sorted input") {
    auto lines = lines_of(scenario());
    const auto sorted = join(lines);
    std::mt19937_64 rng(17);
    std::shuffle(lines.begin(), lines.end(), rng);
    StreamOptions opt;
    opt.max_lateness_days = -1;
    opt.chunk_lines = 50;
    StreamStats stats;
    check_same(streamed(join(lines), RegionLevel::country, opt, &stats), streamed(sorted, RegionLevel::country, {}), 1e-12);
    CHECK(stats.late_dropped == 0);
  }

  TEST_CASE("events older than the lateness horizon are dropped and counted") {
    using mobidx::testing::event_line;
    const std::string text = event_line("a", "2020-02-10T10:00:00Z", 0, 0, "US") + "\n" +
                             event_line("a", "2020-02-10T11:00:00Z", 0, 1, "US") + "\n" +
                             event_line("b", "2020-02-14T10:00:00Z", 0, 0, "US") + "\n" +
                             event_line("a", "2020-02-10T12:00:00Z", 0, 5, "US") + "\n" +  // 4 days late
                             event_line("a", "2020-02-12T12:00:00Z", 0, 5, "US") + "\n";   // 2 days late: kept
    StreamOptions opt;
    opt.chunk_lines = 1;
    StreamStats stats;
    const auto rows = streamed(text, RegionLevel::global, opt, &stats);
    CHECK(stats.late_dropped == 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].day == Date::from_ymd(2020, 2, 10));
    CHECK(*rows[0].mean_d_sd == doctest::Approx(111.195).epsilon(1e-5));
    CHECK(stats.tracks == 3);
    CHECK(stats.single_point_tracks == 2);
  }

  TEST_CASE("diagnostics and tallies") {
    auto lines = lines_of(scenario());
    lines.insert(lines.begin() + 3, "{broken");
    lines.insert(lines.begin(), "# header");
    RegionAssigner regions(RegionLevel::country);
    StreamOptions opt;
    opt.filter = filters();
    StreamingAggregator agg(opt, regions);
    std::istringstream in(join(lines));
    agg.consume(in);
    agg.finish();
    CHECK(agg.diagnostics().lines == lines.size());
    CHECK(agg.diagnostics().malformed == 1);
    CHECK(agg.diagnostics().ignored == 1);
    const auto& t = agg.tallies();
    CHECK(t.kept + t.dropped_precision + t.dropped_source == agg.diagnostics().records);
    CHECK(t.dropped_precision > 0);
    CHECK(t.dropped_source > 0);
    CHECK(agg.regions_seen().size() == 3);  // GLOBAL, US, FR
    CHECK_THROWS_AS(agg.consume(in), InvalidInput);
  }

  TEST_CASE("fnv1a reference") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  }
}
