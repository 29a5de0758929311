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

#include "mobidx/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mobidx/error.hpp"
#include "mobidx/responsiveness.hpp"

namespace mobidx {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::string format_windows(const std::vector<DateRange>& windows) {
  std::string out;
  for (const auto& w : windows) {
    if (!out.empty()) out += ';';
    out += w.label + "=" + to_string(w.first) + ".." + to_string(w.last);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "input",          "baseline_start",    "baseline_end",         "eval_start",   "eval_end",
      "region_level",   "sigma",             "bridge_limit",         "min_precision", "bot_denylist",
      "min_users_per_day", "min_days_per_weekday", "window_scheme",  "windows",      "out",
      "day_offset_hours", "threads",         "max_lateness_days",    "membership",   "region_boxes"};
  return keys;
}

std::vector<DateRange> parse_windows(std::string_view text) {
  std::vector<DateRange> windows;
  for (const auto entry : split(text, ';')) {
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    const auto dots = entry.find("..");
    if (eq == std::string_view::npos || dots == std::string_view::npos || dots < eq) {
      throw ConfigError("windows: expected label=YYYY-MM-DD..YYYY-MM-DD, got '" + std::string(entry) + "'");
    }
    DateRange w;
    w.label = std::string(trim(entry.substr(0, eq)));
    w.first = parse_date_or_throw(trim(entry.substr(eq + 1, dots - eq - 1)), "windows");
    w.last = parse_date_or_throw(trim(entry.substr(dots + 2)), "windows");
    if (w.label.empty()) throw ConfigError("windows: empty label");
    windows.push_back(std::move(w));
  }
  return windows;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "input") {
    c.inputs.clear();
    for (const auto p : split(v, ',')) {
      if (!p.empty()) c.inputs.emplace_back(p);
    }
  } else if (key == "baseline_start") {
    c.baseline.first = parse_date_or_throw(v, key);
  } else if (key == "baseline_end") {
    c.baseline.last = parse_date_or_throw(v, key);
  } else if (key == "eval_start") {
    c.evaluation.first = parse_date_or_throw(v, key);
  } else if (key == "eval_end") {
    c.evaluation.last = parse_date_or_throw(v, key);
  } else if (key == "region_level") {
    const auto level = parse_region_level(v);
    if (!level) throw ConfigError("region_level: expected global, country or admin1");
    c.region_level = *level;
  } else if (key == "sigma") {
    c.sigma = parse_double(key, v);
  } else if (key == "bridge_limit") {
    c.bridge_limit = parse_int(key, v);
  } else if (key == "min_precision") {
    const auto p = parse_precision(v);
    if (!p) throw ConfigError("min_precision: expected gps, city, admin or country");
    c.min_precision = *p;
  } else if (key == "bot_denylist") {
    c.bot_denylist = std::string(v);
  } else if (key == "min_users_per_day") {
    c.min_users_per_day = parse_int(key, v);
  } else if (key == "min_days_per_weekday") {
    c.min_days_per_weekday = parse_int(key, v);
  } else if (key == "window_scheme") {
    if (v == "monthly") {
      c.window_scheme = WindowScheme::monthly;
    } else if (v == "custom") {
      c.window_scheme = WindowScheme::custom;
    } else {
      throw ConfigError("window_scheme: expected monthly or custom");
    }
  } else if (key == "windows") {
    c.windows = parse_windows(v);
  } else if (key == "out") {
    c.out = std::string(v);
  } else if (key == "day_offset_hours") {
    c.day_offset_hours = parse_int(key, v);
  } else if (key == "threads") {
    c.threads = parse_int(key, v);
  } else if (key == "max_lateness_days") {
    c.max_lateness_days = v == "unbounded" ? -1 : parse_int(key, v);
  } else if (key == "membership") {
    if (v == "tags") {
      c.membership = Membership::tags;
    } else if (v == "bbox") {
      c.membership = Membership::bbox;
    } else {
      throw ConfigError("membership: expected tags or bbox");
    }
  } else if (key == "region_boxes") {
    c.region_boxes = std::string(v);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void RunConfig::validate() const {
  if (inputs.empty()) throw ConfigError("no input files given");
  if (baseline.last < baseline.first) throw ConfigError("baseline window is empty (baseline_end < baseline_start)");
  if (evaluation.last < evaluation.first) throw ConfigError("evaluation window is empty (eval_end < eval_start)");
  if (evaluation.first < baseline.first) {
    throw ConfigError("baseline window must start on or before the evaluation window");
  }
  if (!(sigma > 0)) throw ConfigError("sigma must be positive");
  if (bridge_limit < 0) throw ConfigError("bridge_limit must be non-negative");
  if (min_users_per_day < 1 || min_days_per_weekday < 1) {
    throw ConfigError("min_users_per_day and min_days_per_weekday must be at least 1");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (day_offset_hours < -23 || day_offset_hours > 23) throw ConfigError("day_offset_hours must lie in [-23, 23]");
  if (max_lateness_days < -1) throw ConfigError("max_lateness_days must be >= 0 or unbounded");
  if (out.empty()) throw ConfigError("out directory is empty");
  if (membership == Membership::bbox && region_boxes.empty()) {
    throw ConfigError("bbox membership needs region_boxes");
  }
  if (window_scheme == WindowScheme::custom) {
    if (windows.empty()) throw ConfigError("custom window scheme needs windows");
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& w = windows[i];
      if (w.last < w.first) throw ConfigError("window " + w.label + " is empty");
      if (w.first < evaluation.first || w.last > evaluation.last) {
        throw ConfigError("window " + w.label + " lies outside the evaluation window");
      }
      if (i > 0 && windows[i - 1].last >= w.first) {
        throw ConfigError("windows must be ordered and non-overlapping");
      }
    }
  }
}

std::vector<DateRange> RunConfig::report_windows() const {
  if (window_scheme == WindowScheme::custom) return windows;
  return monthly_windows(evaluation);
}

std::string describe(const RunConfig& c) {
  std::ostringstream s;
  s << "baseline_start = " << to_string(c.baseline.first) << '\n'
    << "baseline_end = " << to_string(c.baseline.last) << '\n'
    << "eval_start = " << to_string(c.evaluation.first) << '\n'
    << "eval_end = " << to_string(c.evaluation.last) << '\n'
    << "region_level = " << to_string(c.region_level) << '\n'
    << "sigma = " << c.sigma << '\n'
    << "bridge_limit = " << c.bridge_limit << '\n'
    << "min_precision = " << to_string(c.min_precision) << '\n'
    << "min_users_per_day = " << c.min_users_per_day << '\n'
    << "min_days_per_weekday = " << c.min_days_per_weekday << '\n'
    << "window_scheme = " << (c.window_scheme == WindowScheme::monthly ? "monthly" : "custom") << '\n';
  if (c.window_scheme == WindowScheme::custom) s << "windows = " << format_windows(c.windows) << '\n';
  s << "day_offset_hours = " << c.day_offset_hours << '\n'
    << "max_lateness_days = ";
  if (c.max_lateness_days < 0) {
    s << "unbounded";
  } else {
    s << c.max_lateness_days;
  }
  s << '\n' << "membership = " << (c.membership == Membership::tags ? "tags" : "bbox") << '\n';
  return s.str();
}

}  // namespace mobidx
