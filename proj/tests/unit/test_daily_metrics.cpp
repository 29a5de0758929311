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

#include <random>

#include "mobidx/daily_metrics.hpp"
#include "mobidx/error.hpp"
#include "test_support.hpp"

using namespace mobidx;
using mobidx::testing::reference_distance_km;

namespace {

UserDayTrack track(const std::string& user, Date day, std::vector<GeoPoint> pts, TagId tag = 0) {
  UserDayTrack t{user, day, {}};
  Timestamp ts = start_of(day) + 3600;
  for (const auto& p : pts) t.points.push_back({ts += 60, p, tag});
  return t;
}

const Date kDay = Date::from_ymd(2020, 1, 20);

}  // namespace

TEST_SUITE("daily_metrics") {
  TEST_CASE("single-day distance") {
    CHECK_FALSE(single_day_distance(track("u", kDay, {{0, 0}})));
    CHECK(single_day_distance(track("u", kDay, {{3, 4}, {3, 4}, {3, 4}})) == 0.0);
    const auto d = single_day_distance(track("u", kDay, {{0, 0}, {0, 1}, {0, 2}, {0, 1}}));
    REQUIRE(d);
    CHECK(*d == doctest::Approx(reference_distance_km(0, 0, 0, 2)).epsilon(1e-12));
    CHECK(*d == doctest::Approx(222.39).epsilon(1e-4));
  }

  TEST_CASE("single-day distance is the max over the first point, not the span") {
    // (0,-1) first; (0,1) and (0,-3) are both 2 degrees away, but 4 apart.
    const auto d = single_day_distance(track("u", kDay, {{0, -1}, {0, 1}, {0, -3}}));
    CHECK(*d == doctest::Approx(reference_distance_km(0, -1, 0, 1)).epsilon(1e-12));
  }

  TEST_CASE("cross-day distance") {
    CHECK(cross_day_distance(track("u", kDay, {{1, 1}}), track("u", kDay + 1, {{1, 1}})) == 0.0);
    const double d = cross_day_distance(track("u", kDay, {{0, 10}, {0, -10}}), track("u", kDay + 1, {{0, 1}}));
    CHECK(d == doctest::Approx(reference_distance_km(0, 0, 0, 1)).epsilon(1e-12));
    CHECK(d == doctest::Approx(111.195).epsilon(1e-5));
    CHECK_THROWS_AS(cross_day_distance(track("u", kDay, {{0, 0}}), track("u", kDay + 2, {{0, 0}})), InvalidInput);
    CHECK_THROWS_AS(cross_day_distance(track("u", kDay, {{0, 0}}), track("v", kDay + 1, {{0, 0}})), InvalidInput);
  }

  TEST_CASE("mean-center tag is the point nearest the middle of the day's span") {
    UserDayTrack t{"u", kDay, {}};
    const Timestamp t0 = start_of(kDay);
    t.points = {{t0 + 0, {0, 0}, 1}, {t0 + 100, {0, 0}, 2}, {t0 + 500, {0, 0}, 3}, {t0 + 1000, {0, 0}, 4}};
    CHECK(mean_center_tag(t) == 3);
    t.points = {{t0 + 0, {0, 0}, 1}, {t0 + 100, {0, 0}, 2}, {t0 + 200, {0, 0}, 3}};
    CHECK(mean_center_tag(t) == 2);
    // Equidistant from the middle: the earlier point wins.
    t.points = {{t0 + 0, {0, 0}, 1}, {t0 + 40, {0, 0}, 2}, {t0 + 60, {0, 0}, 3}, {t0 + 100, {0, 0}, 4}};
    CHECK(mean_center_tag(t) == 2);
  }

  TEST_CASE("aggregation") {
    RegionAssigner regions(RegionLevel::country);
    const TagId us = regions.intern_tags("US", "");
    DailyAccumulator acc;
    const RegionId r = *regions.region_of({0, 0}, us);
    acc.add_single_day(r, kDay, 100);
    acc.add_single_day(r, kDay, 300);
    acc.add_cross_day(r, kDay, 50);
    const auto rows = acc.finish(regions);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].region_id == "US");
    CHECK(rows[0].mean_d_sd == 200.0);
    CHECK(rows[0].n_sd == 2);
    CHECK(rows[0].mean_d_cd == 50.0);
    CHECK(rows[0].n_cd == 1);
  }

  TEST_CASE("independent eligibility and GLOBAL") {
    RegionAssigner regions(RegionLevel::country);
    const TagId us = regions.intern_tags("US", "");
    // Two points on day 1 (sd), none on day 2: no cd.
    const std::vector<UserDayTrack> tracks{track("u", kDay, {{0, 0}, {0, 1}}, us)};
    const auto recs = compute_user_distances(tracks);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].d_sd);
    CHECK_FALSE(recs[0].d_cd);
    const auto rows = aggregate_daily(recs, regions);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].region_id == "GLOBAL");
    CHECK(rows[1].region_id == "US");
    for (const auto& row : rows) {
      CHECK(row.n_sd == 1);
      CHECK(row.n_cd == 0);
      CHECK_FALSE(row.mean_d_cd);
    }
  }

  TEST_CASE("single-point days only contribute cross-day distances") {
    RegionAssigner regions(RegionLevel::country);
    const TagId us = regions.intern_tags("US", "");
    const std::vector<UserDayTrack> tracks{track("u", kDay, {{0, 0}}, us), track("u", kDay + 1, {{0, 1}}, us)};
    const auto rows = aggregate_daily(compute_user_distances(tracks), regions);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].day == kDay);
    CHECK(rows[0].n_sd == 0);
    CHECK(rows[0].n_cd == 1);
    CHECK(*rows[0].mean_d_cd == doctest::Approx(111.195).epsilon(1e-5));
  }

  TEST_CASE("no eligible users means no cell") {
    RegionAssigner regions(RegionLevel::country);
    const TagId us = regions.intern_tags("US", "");
    const std::vector<UserDayTrack> tracks{track("u", kDay, {{0, 0}}, us), track("u", kDay + 2, {{0, 1}}, us)};
    CHECK(aggregate_daily(compute_user_distances(tracks), regions).empty());
  }

  TEST_CASE("merge order does not change results") {
    RegionAssigner regions(RegionLevel::global);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0, 500);
    DailyAccumulator whole, a, b;
    for (int i = 0; i < 100; ++i) {
      const double x = d(rng);
      whole.add_single_day(kGlobalRegion, kDay + (i % 3), x);
      (i < 50 ? a : b).add_single_day(kGlobalRegion, kDay + (i % 3), x);
    }
    DailyAccumulator merged;
    merged.merge(a);
    merged.merge(b);
    const auto x = whole.finish(regions);
    const auto y = merged.finish(regions);
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i].n_sd == y[i].n_sd);
      CHECK(*x[i].mean_d_sd == doctest::Approx(*y[i].mean_d_sd).epsilon(1e-12));
    }
  }
}
