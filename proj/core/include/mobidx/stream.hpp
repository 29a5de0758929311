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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mobidx/daily_metrics.hpp"
#include "mobidx/ingest.hpp"
#include "mobidx/regions.hpp"

namespace mobidx {

struct StreamStats {
  std::uint64_t late_dropped = 0;
  std::uint64_t tracks = 0;
  std::uint64_t single_point_tracks = 0;
  std::uint64_t antimeridian_tracks = 0;
  std::uint64_t sd_user_days = 0;
  std::uint64_t cd_user_pairs = 0;

  void merge(const StreamStats& other) noexcept;
};

struct StreamOptions {
  FilterConfig filter;
  int day_offset_hours = 0;
  /// -1: nothing closes before end of input.
  int max_lateness_days = 2;
  unsigned threads = 1;
  /// Fixed so that summation order, and thus output, does not depend on the
  /// thread count.
  std::size_t partitions = 64;
  std::size_t chunk_lines = 1 << 15;
};

/// Single-pass ingestion: parse, filter, group into user-day tracks and fold
/// closed tracks into regional daily sums.
///
/// A (user, day) track stays open until the latest day seen, minus
/// max_lateness_days, moves past it; an event for an already-closed day is
/// dropped and counted as late. Acceptance of an event depends only on the
/// events before it in file order, so results are independent of chunk size
/// and thread count. Memory is proportional to the open tracks plus one
/// small summary per recently active user.
class StreamingAggregator {
 public:
  StreamingAggregator(StreamOptions options, RegionAssigner& regions);
  ~StreamingAggregator();
  StreamingAggregator(const StreamingAggregator&) = delete;
  StreamingAggregator& operator=(const StreamingAggregator&) = delete;

  /// Reads the whole stream. Throws InputError if it cannot be read.
  void consume(std::istream& in);

  /// Consumes one parsed event as if it were the next line of input.
  void consume(const LocatedEvent& event);

  /// Closes every open track and returns the per-region daily metrics.
  std::vector<DailyRegionMetrics> finish();

  const ParseDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  const FilterTallies& tallies() const noexcept { return tallies_; }
  const StreamStats& stats() const noexcept { return stats_; }
  /// Regions (including GLOBAL) that kept events resolve to.
  const std::set<RegionId>& regions_seen() const noexcept { return regions_seen_; }

 private:
  class Partition;
  struct Pending {
    std::string user;
    Date day;
    TrackPoint point;
  };

  void route(const LocatedEvent& event, std::vector<std::vector<Pending>>& buckets);
  void apply(std::vector<std::vector<Pending>>& buckets);
  std::optional<Date> frontier() const;

  StreamOptions options_;
  RegionAssigner& regions_;
  std::vector<std::unique_ptr<Partition>> partitions_;
  ParseDiagnostics diagnostics_;
  FilterTallies tallies_;
  StreamStats stats_;
  std::set<RegionId> regions_seen_;
  std::optional<Date> watermark_;
  bool finished_ = false;
};

/// 64-bit FNV-1a; stable across platforms, used to partition users.
std::uint64_t fnv1a(std::string_view s) noexcept;

}  // namespace mobidx
