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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mobidx {

/// Seconds since 1970-01-01T00:00:00Z.
using Timestamp = std::int64_t;

/// A proleptic Gregorian calendar date, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  constexpr std::int32_t days_since_epoch() const { return days_; }

  /// 0 = Monday ... 6 = Sunday.
  int weekday() const;
  int year() const;
  unsigned month() const;
  unsigned day() const;

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
  constexpr Date& operator++() {
    ++days_;
    return *this;
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

/// Closed range [first, last] of calendar days with an optional label.
struct DateRange {
  Date first;
  Date last;
  std::string label;

  bool contains(Date d) const { return first <= d && d <= last; }
  std::int32_t length() const { return last - first + 1; }
};

/// Parses "YYYY-MM-DD". Returns nullopt on malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);
/// Like parse_date but throws ConfigError naming `what`.
Date parse_date_or_throw(std::string_view text, std::string_view what);

std::string to_string(Date d);
/// "YYYY-MM"
std::string month_label(Date d);
std::string_view weekday_name(int weekday);

/// Parses an ISO-8601 instant such as "2020-03-11T14:03:00Z" or
/// "2020-03-11T09:03:00-05:00". Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Calendar day of `ts` after shifting the day boundary by `offset_hours`.
Date day_of(Timestamp ts, int offset_hours = 0);

/// Seconds since epoch at 00:00:00 UTC of `d`.
Timestamp start_of(Date d);

}  // namespace mobidx
