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

#include "mobidx/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>

#include "mobidx/error.hpp"

namespace mobidx::synth {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kKmPerDegree = kEarthMeanRadiusKm * std::numbers::pi / 180.0;

// Uniform in [0, 1) from the top 53 bits; independent of std distributions,
// whose output is implementation-defined.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return lo + std::min(static_cast<std::int64_t>(unit(rng) * span), hi - lo);
}

struct User {
  std::string id;
  std::uint64_t seed = 0;
  GeoPoint home;
  const RegionSpec* region = nullptr;
  bool bot = false;
};

std::vector<User> make_users(const ScenarioConfig& c) {
  std::vector<User> users;
  users.reserve(static_cast<std::size_t>(c.n_users));
  double total_weight = 0;
  for (const auto& r : c.regions) total_weight += r.weight;
  const int width = std::max<int>(6, static_cast<int>(std::to_string(c.n_users).size()));
  for (std::int64_t i = 0; i < c.n_users; ++i) {
    User u;
    std::string digits = std::to_string(i);
    u.id = c.user_prefix + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
    u.seed = splitmix64(c.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1));
    std::mt19937_64 rng(u.seed);
    double pick = unit(rng) * total_weight;
    u.region = &c.regions.back();
    for (const auto& r : c.regions) {
      if (pick < r.weight) {
        u.region = &r;
        break;
      }
      pick -= r.weight;
    }
    u.home.lat = u.region->min_lat + unit(rng) * (u.region->max_lat - u.region->min_lat);
    u.home.lon = u.region->min_lon + unit(rng) * (u.region->max_lon - u.region->min_lon);
    u.bot = unit(rng) < c.bot_fraction;
    users.push_back(std::move(u));
  }
  return users;
}

// Uniform point in a disc on the local tangent plane around `center`.
GeoPoint disc_point(std::mt19937_64& rng, GeoPoint center, double radius_km) {
  const double r = radius_km * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  GeoPoint p;
  p.lat = std::clamp(center.lat + r * std::cos(theta) / kKmPerDegree, -90.0, 90.0);
  const double coslat = std::max(std::cos(center.lat * std::numbers::pi / 180.0), 1e-6);
  double lon = center.lon + r * std::sin(theta) / (kKmPerDegree * coslat);
  while (lon > 180.0) lon -= 360.0;
  while (lon < -180.0) lon += 360.0;
  p.lon = lon;
  return p;
}

template <typename Sink>
void generate_into(const ScenarioConfig& c, Sink&& sink) {
  c.validate();
  const auto users = make_users(c);
  std::vector<LocatedEvent> day_events;
  for (Date d = c.dates.first; d <= c.dates.last; ++d) {
    const double radius = c.radius_on(d);
    const auto day_index = static_cast<std::uint64_t>(d - c.dates.first);
    for (const auto& u : users) {
      std::mt19937_64 rng(splitmix64(u.seed + kGolden * (day_index + 1)));
      if (unit(rng) >= c.post_probability) continue;
      const auto k = uniform_int(rng, c.posts_min, c.posts_max);
      day_events.clear();
      for (std::int64_t j = 0; j < k; ++j) {
        LocatedEvent ev;
        ev.user_id = u.id;
        ev.ts = start_of(d) + uniform_int(rng, 0, 86399);
        ev.point = disc_point(rng, u.home, radius);
        ev.country = u.region->country;
        ev.admin1 = u.region->admin1;
        ev.source = u.bot ? c.bot_source : c.source;
        ev.precision = unit(rng) < c.coarse_fraction ? Precision::admin : Precision::gps;
        day_events.push_back(std::move(ev));
      }
      std::stable_sort(day_events.begin(), day_events.end(),
                       [](const LocatedEvent& a, const LocatedEvent& b) { return a.ts < b.ts; });
      for (auto& ev : day_events) sink(std::move(ev));
    }
  }
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_ts(Timestamp ts) {
  const Date d = day_of(ts);
  const auto secs = ts - start_of(d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", to_string(d).c_str(), static_cast<int>(secs / 3600),
                static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("scenario key '") + key + "' has the wrong type");
  }
}

Date get_date(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ConfigError(std::string("scenario key '") + key + "' is required");
  return parse_date_or_throw(it->get<std::string>(), key);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void ScenarioConfig::validate() const {
  auto prob = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (n_users < 0) throw ConfigError("n_users must be non-negative");
  if (dates.last < dates.first) throw ConfigError("scenario date range is empty");
  if (n_users > 0 && regions.empty()) throw ConfigError("scenario needs at least one region");
  double total = 0;
  for (const auto& r : regions) {
    if (r.country.empty()) throw ConfigError("region country is required");
    if (!is_valid({r.min_lat, r.min_lon}) || !is_valid({r.max_lat, r.max_lon}) || r.min_lat > r.max_lat ||
        r.min_lon > r.max_lon) {
      throw ConfigError("region " + r.country + " has an invalid box");
    }
    if (!(r.weight >= 0) || !std::isfinite(r.weight)) throw ConfigError("region weights must be non-negative");
    total += r.weight;
  }
  if (!regions.empty() && !(total > 0)) throw ConfigError("region weights sum to zero");
  if (posts_min < 1 || posts_max < posts_min) throw ConfigError("posts_per_day needs 1 <= min <= max");
  if (!prob(post_probability) || !prob(bot_fraction) || !prob(coarse_fraction)) {
    throw ConfigError("probabilities must lie in [0, 1]");
  }
  if (!(base_radius_km >= 0) || !std::isfinite(base_radius_km)) throw ConfigError("radii must be non-negative");
  for (std::size_t i = 0; i < radius_schedule.size(); ++i) {
    const auto& p = radius_schedule[i];
    if (!(p.radius_km >= 0) || !std::isfinite(p.radius_km)) throw ConfigError("radii must be non-negative");
    if (p.range.last < p.range.first) throw ConfigError("radius schedule range is empty");
    if (i > 0 && radius_schedule[i - 1].range.last >= p.range.first) {
      throw ConfigError("radius schedule ranges must be ordered and non-overlapping");
    }
  }
}

double ScenarioConfig::radius_on(Date d) const {
  for (const auto& p : radius_schedule) {
    if (p.range.contains(d)) return p.radius_km;
  }
  return base_radius_km;
}

ScenarioConfig parse_scenario(std::string_view json_text) {
  const json j = json::parse(json_text.begin(), json_text.end(), nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("scenario is not a JSON object");
  ScenarioConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.n_users = get_or<std::int64_t>(j, "n_users", c.n_users);
  c.dates = {get_date(j, "start_date"), get_date(j, "end_date"), {}};
  if (const auto it = j.find("regions"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("scenario key 'regions' must be an array");
    for (const auto& r : *it) {
      RegionSpec spec;
      spec.country = get_or<std::string>(r, "country", "");
      if (const auto a = r.find("admin1"); a != r.end() && a->is_string()) spec.admin1 = a->get<std::string>();
      spec.min_lat = get_or<double>(r, "min_lat", 0);
      spec.max_lat = get_or<double>(r, "max_lat", 0);
      spec.min_lon = get_or<double>(r, "min_lon", 0);
      spec.max_lon = get_or<double>(r, "max_lon", 0);
      spec.weight = get_or<double>(r, "weight", 1.0);
      c.regions.push_back(std::move(spec));
    }
  }
  if (const auto it = j.find("posts_per_day"); it != j.end()) {
    c.posts_min = get_or<int>(*it, "min", c.posts_min);
    c.posts_max = get_or<int>(*it, "max", c.posts_max);
  }
  c.post_probability = get_or<double>(j, "post_probability", c.post_probability);
  c.base_radius_km = get_or<double>(j, "base_radius_km", c.base_radius_km);
  if (const auto it = j.find("radius_schedule"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("scenario key 'radius_schedule' must be an array");
    for (const auto& p : *it) {
      c.radius_schedule.push_back({{get_date(p, "start"), get_date(p, "end"), {}}, get_or<double>(p, "radius_km", 0)});
    }
  }
  c.source = get_or<std::string>(j, "source", c.source);
  c.bot_fraction = get_or<double>(j, "bot_fraction", c.bot_fraction);
  c.bot_source = get_or<std::string>(j, "bot_source", c.bot_source);
  c.coarse_fraction = get_or<double>(j, "coarse_fraction", c.coarse_fraction);
  c.user_prefix = get_or<std::string>(j, "user_prefix", c.user_prefix);
  c.validate();
  return c;
}

std::vector<LocatedEvent> generate_events(const ScenarioConfig& config) {
  std::vector<LocatedEvent> events;
  generate_into(config, [&](LocatedEvent&& ev) { events.push_back(std::move(ev)); });
  return events;
}

std::string format_event_line(const LocatedEvent& ev) {
  std::string line = "{\"user_id\":";
  line += json(ev.user_id).dump();
  line += ",\"ts\":\"" + format_ts(ev.ts) + "\"";
  line += ",\"lat\":" + format_number(ev.point.lat);
  line += ",\"lon\":" + format_number(ev.point.lon);
  line += ",\"country\":" + json(ev.country).dump();
  line += ",\"admin1\":" + (ev.admin1 ? json(*ev.admin1).dump() : std::string("null"));
  line += ",\"source\":" + json(ev.source).dump();
  line += ",\"precision\":\"" + std::string(to_string(ev.precision)) + "\"}";
  return line;
}

void generate(const ScenarioConfig& config, std::ostream& out) {
  config.validate();
  if (config.n_users == 0) return;
  out << "# mobidx synth generator=" << kGeneratorId << " seed=" << config.seed << " users=" << config.n_users
      << " dates=" << to_string(config.dates.first) << ".." << to_string(config.dates.last) << '\n';
  generate_into(config, [&](LocatedEvent&& ev) { out << format_event_line(ev) << '\n'; });
  if (!out) throw InputError("failed writing generated events");
}

}  // namespace mobidx::synth
