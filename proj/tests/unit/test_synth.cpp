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

#include <cmath>
#include <map>
#include <sstream>

#include "mobidx/daily_metrics.hpp"
#include "mobidx/error.hpp"
#include "mobidx/synth.hpp"

using namespace mobidx;
using namespace mobidx::synth;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.seed = 42;
  c.n_users = 30;
  c.dates = {Date::from_ymd(2020, 1, 13), Date::from_ymd(2020, 1, 26), {}};
  c.regions = {{"US", "NY", 40, 41, -75, -73, 1.0}, {"CA", std::nullopt, 45, 46, -74, -72, 2.0}};
  c.posts_min = 1;
  c.posts_max = 4;
  c.post_probability = 0.8;
  return c;
}

std::string render(const ScenarioConfig& c) {
  std::ostringstream s;
  generate(c, s);
  return s.str();
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("splitmix64 reference values") {
    // First outputs of the reference splitmix64 stream seeded with 0.
    std::uint64_t state = 0;
    auto next = [&] {
      const auto out = splitmix64(state);
      state += 0x9E3779B97F4A7C15ULL;
      return out;
    };
    CHECK(next() == 0xE220A8397B1DCDAFULL);
    CHECK(next() == 0x6E789E6AA1B965F4ULL);
    CHECK(next() == 0x06C45D188009454FULL);
  }

  TEST_CASE("same seed, same bytes; different seed, different bytes") {
    auto c = small_scenario();
    const auto a = render(c);
    CHECK(a == render(c));
    CHECK(a.rfind("# mobidx synth generator=mt19937_64/splitmix64-v1 seed=42", 0) == 0);
    c.seed = 43;
    CHECK(a != render(c));
  }

  TEST_CASE("a user's stream does not depend on the other users") {
    auto c = small_scenario();
    const auto all = generate_events(c);
    c.n_users = 5;
    const auto few = generate_events(c);
    std::vector<LocatedEvent> first_five;
    for (const auto& e : all) {
      if (e.user_id < "u000005") first_five.push_back(e);
    }
    REQUIRE(first_five.size() == few.size());
    for (std::size_t i = 0; i < few.size(); ++i) {
      CHECK(first_five[i].user_id == few[i].user_id);
      CHECK(first_five[i].ts == few[i].ts);
      CHECK(first_five[i].point == few[i].point);
    }
  }

  TEST_CASE("output parses back through ingest") {
    const auto c = small_scenario();
    std::istringstream in(render(c));
    const auto parsed = parse_events(in);
    const auto events = generate_events(c);
    CHECK(parsed.diagnostics.malformed == 0);
    CHECK(parsed.diagnostics.ignored == 1);
    REQUIRE(parsed.events.size() == events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(parsed.events[i].point == events[i].point);
      CHECK(parsed.events[i].ts == events[i].ts);
      CHECK(parsed.events[i].admin1 == events[i].admin1);
    }
  }

  TEST_CASE("posts respect the schedule and stay near home") {
    auto c = small_scenario();
    c.base_radius_km = 25;
    const auto events = generate_events(c);
    std::map<std::string, std::vector<GeoPoint>> by_user;
    std::map<std::pair<std::string, Date>, int> per_day;
    for (const auto& e : events) {
      CHECK(c.dates.contains(day_of(e.ts)));
      by_user[e.user_id].push_back(e.point);
      ++per_day[{e.user_id, day_of(e.ts)}];
    }
    for (const auto& [key, n] : per_day) {
      CHECK(n >= c.posts_min);
      CHECK(n <= c.posts_max);
    }
    // Every pair of a user's posts lies within two radii (plus tangent-plane slack).
    for (const auto& [user, pts] : by_user) {
      for (const auto& p : pts) CHECK(great_circle_distance(pts[0], p) <= 2 * 25 * 1.001);
    }
  }

  TEST_CASE("radius zero puts every post at home") {
    auto c = small_scenario();
    c.base_radius_km = 0;
    const auto events = generate_events(c);
    std::map<std::string, GeoPoint> home;
    for (const auto& e : events) {
      const auto [it, fresh] = home.emplace(e.user_id, e.point);
      CHECK(it->second == e.point);
    }
  }

  TEST_CASE("disc sampling is uniform in area") {
    ScenarioConfig c;
    c.n_users = 1;
    c.dates = {Date::from_ymd(2020, 1, 1), Date::from_ymd(2020, 12, 31), {}};
    c.regions = {{"X", std::nullopt, 10, 10, 20, 20, 1.0}};
    c.posts_min = c.posts_max = 20;
    c.base_radius_km = 100;
    int inner = 0, total = 0;
    for (const auto& e : generate_events(c)) {
      const double r = great_circle_distance({10, 20}, e.point);
      CHECK(r <= 100.5);
      inner += r <= 100 / std::sqrt(2.0);
      ++total;
    }
    // Half the area lies inside radius R / sqrt(2).
    CHECK(static_cast<double>(inner) / total == doctest::Approx(0.5).epsilon(0.05));
  }

  TEST_CASE("bots, coarse posts and empty scenarios") {
    auto c = small_scenario();
    c.bot_fraction = 1.0;
    c.coarse_fraction = 1.0;
    for (const auto& e : generate_events(c)) {
      CHECK(e.source == "AutoPoster");
      CHECK(e.precision == Precision::admin);
    }
    c.n_users = 0;
    CHECK(render(c).empty());
  }

  TEST_CASE("scenario parsing") {
    const auto c = parse_scenario(R"({
      "seed": 9, "n_users": 12, "start_date": "2020-01-13", "end_date": "2020-03-31",
      "regions": [{"country": "US", "admin1": "NY", "min_lat": 40, "max_lat": 41, "min_lon": -75, "max_lon": -73}],
      "posts_per_day": {"min": 2, "max": 5},
      "radius_schedule": [{"start": "2020-03-01", "end": "2020-03-31", "radius_km": 5}],
      "base_radius_km": 10
    })");
    CHECK(c.seed == 9);
    CHECK(c.n_users == 12);
    CHECK(c.posts_min == 2);
    CHECK(c.radius_on(Date::from_ymd(2020, 2, 29)) == 10);
    CHECK(c.radius_on(Date::from_ymd(2020, 3, 1)) == 5);
    CHECK(c.regions.at(0).admin1 == "NY");
    CHECK_THROWS_AS(parse_scenario("{}"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("not json"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"start_date":"2020-01-01","end_date":"2020-01-02","n_users":"many"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"start_date":"2020-01-01","end_date":"2020-01-02",
      "regions":[{"country":"X","min_lat":0,"max_lat":1,"min_lon":0,"max_lon":1}],"post_probability":2})"),
                    ConfigError);
  }
}
