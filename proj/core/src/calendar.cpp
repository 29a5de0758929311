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

#include "mobidx/calendar.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "mobidx/error.hpp"

namespace mobidx {

namespace {

using std::chrono::sys_days;
using std::chrono::year_month_day;

year_month_day to_ymd(Date d) {
  return year_month_day{sys_days{std::chrono::days{d.days_since_epoch()}}};
}

// Reads exactly `width` decimal digits starting at `pos`.
bool read_fixed(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + width, out);
  return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw InvalidInput("invalid calendar date");
  return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

int Date::weekday() const {
  const std::chrono::weekday wd{sys_days{std::chrono::days{days_}}};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!read_fixed(text, 0, 4, y) || !read_fixed(text, 5, 2, m) || !read_fixed(text, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

Date parse_date_or_throw(std::string_view text, std::string_view what) {
  if (auto d = parse_date(text)) return *d;
  throw ConfigError(std::string(what) + ": expected an ISO date YYYY-MM-DD, got '" + std::string(text) + "'");
}

std::string to_string(Date d) {
  const auto ymd = to_ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string month_label(Date d) { return to_string(d).substr(0, 7); }

std::string_view weekday_name(int weekday) {
  static constexpr std::array<std::string_view, 7> kNames{"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  return kNames.at(static_cast<std::size_t>(weekday));
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDThh:mm:ss[.fff](Z|±hh:mm)
  if (text.size() < 20) return std::nullopt;
  const auto date = parse_date(text.substr(0, 10));
  if (!date || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!read_fixed(text, 11, 2, hh) || text[13] != ':' || !read_fixed(text, 14, 2, mm) || text[16] != ':' ||
      !read_fixed(text, 17, 2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == digits_start) return std::nullopt;
  }
  if (pos >= text.size()) return std::nullopt;
  std::int64_t offset_seconds = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '-' ? -1 : 1;
    int oh = 0, om = 0;
    if (!read_fixed(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_fixed(text, pos + 4, 2, om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset_seconds = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  return start_of(*date) + hh * 3600 + mm * 60 + ss - offset_seconds;
}

Date day_of(Timestamp ts, int offset_hours) {
  return Date(static_cast<std::int32_t>(floor_div(ts + std::int64_t{offset_hours} * 3600, 86400)));
}

Timestamp start_of(Date d) { return std::int64_t{d.days_since_epoch()} * 86400; }

}  // namespace mobidx
