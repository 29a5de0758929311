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

#include "mobidx/stream.hpp"

#include <istream>

#include "mobidx/error.hpp"
#include "mobidx/parallel.hpp"

namespace mobidx {

void StreamStats::merge(const StreamStats& o) noexcept {
  late_dropped += o.late_dropped;
  tracks += o.tracks;
  single_point_tracks += o.single_point_tracks;
  antimeridian_tracks += o.antimeridian_tracks;
  sd_user_days += o.sd_user_days;
  cd_user_pairs += o.cd_user_pairs;
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class StreamingAggregator::Partition {
 public:
  explicit Partition(const RegionAssigner& regions) : regions_(regions) {}

  void add(std::string&& user, Date day, const TrackPoint& point) {
    auto& state = users_[user];
    auto [it, inserted] = state.open.try_emplace(day);
    if (inserted) open_by_day_[day].push_back(std::move(user));
    it->second.push_back(point);
  }

  /// Closes tracks on days before `frontier`; everything when nullopt.
  void close_before(std::optional<Date> frontier) {
    while (!open_by_day_.empty() && (!frontier || open_by_day_.begin()->first < *frontier)) {
      auto node = open_by_day_.extract(open_by_day_.begin());
      for (const auto& user : node.mapped()) close_track(user, node.key());
    }
    if (!frontier) {
      users_.clear();
      last_by_day_.clear();
      return;
    }
    while (!last_by_day_.empty() && last_by_day_.begin()->first < *frontier - 1) {
      auto node = last_by_day_.extract(last_by_day_.begin());
      for (const auto& user : node.mapped()) {
        const auto it = users_.find(user);
        if (it != users_.end() && it->second.open.empty() && it->second.last && it->second.last->day == node.key()) {
          users_.erase(it);
        }
      }
    }
  }

  DailyAccumulator accumulator;
  StreamStats stats;

 private:
  struct DaySummary {
    Date day;
    GeoPoint center;
    TagId tag = 0;
  };
  struct UserState {
    std::map<Date, std::vector<TrackPoint>> open;
    std::optional<DaySummary> last;
  };

  void close_track(const std::string& user, Date day) {
    auto& state = users_.at(user);
    auto node = state.open.extract(day);
    UserDayTrack track{user, day, std::move(node.mapped())};
    sort_track_points(track.points);

    ++stats.tracks;
    if (track.points.size() == 1) ++stats.single_point_tracks;
    const auto positions = track.positions();
    if (straddles_antimeridian(positions)) ++stats.antimeridian_tracks;

    if (const auto d_sd = single_day_distance(track)) {
      ++stats.sd_user_days;
      const auto& first = track.points.front();
      accumulator.add_single_day(kGlobalRegion, day, *d_sd);
      if (const auto r = regions_.region_of(first.point, first.tag)) accumulator.add_single_day(*r, day, *d_sd);
    }

    const DaySummary today{day, mean_center(positions), mean_center_tag(track)};
    if (state.last && day - state.last->day == 1) {
      const auto& prev = *state.last;
      const double d_cd = great_circle_distance(prev.center, today.center);
      ++stats.cd_user_pairs;
      accumulator.add_cross_day(kGlobalRegion, prev.day, d_cd);
      if (const auto r = regions_.region_of(prev.center, prev.tag)) accumulator.add_cross_day(*r, prev.day, d_cd);
    }
    state.last = today;
    last_by_day_[day].push_back(user);
  }

  const RegionAssigner& regions_;
  std::unordered_map<std::string, UserState> users_;
  std::map<Date, std::vector<std::string>> open_by_day_;
  std::map<Date, std::vector<std::string>> last_by_day_;
};

StreamingAggregator::StreamingAggregator(StreamOptions options, RegionAssigner& regions)
    : options_(std::move(options)), regions_(regions) {
  if (options_.partitions == 0) options_.partitions = 1;
  if (options_.chunk_lines == 0) options_.chunk_lines = 1;
  if (options_.threads == 0) options_.threads = 1;
  for (std::size_t i = 0; i < options_.partitions; ++i) partitions_.push_back(std::make_unique<Partition>(regions_));
}

StreamingAggregator::~StreamingAggregator() = default;

std::optional<Date> StreamingAggregator::frontier() const {
  if (options_.max_lateness_days < 0 || !watermark_) return std::nullopt;
  return *watermark_ - options_.max_lateness_days;
}

void StreamingAggregator::route(const LocatedEvent& ev, std::vector<std::vector<Pending>>& buckets) {
  const auto verdict = classify(ev, options_.filter);
  tallies_.count(verdict);
  if (verdict != FilterVerdict::keep) return;

  const Date day = day_of(ev.ts, options_.day_offset_hours);
  if (const auto f = frontier(); f && day < *f) {
    ++stats_.late_dropped;
    return;
  }
  if (!watermark_ || day > *watermark_) watermark_ = day;

  const TagId tag = regions_.intern_tags(ev.country, ev.admin1 ? std::string_view(*ev.admin1) : std::string_view{});
  regions_seen_.insert(kGlobalRegion);
  if (const auto r = regions_.region_of(ev.point, tag)) regions_seen_.insert(*r);

  const std::size_t p = fnv1a(ev.user_id) % partitions_.size();
  buckets[p].push_back({ev.user_id, day, {ev.ts, ev.point, tag}});
}

void StreamingAggregator::apply(std::vector<std::vector<Pending>>& buckets) {
  const auto close_at = frontier();
  parallel_for(partitions_.size(), options_.threads, [&](std::size_t i) {
    auto& part = *partitions_[i];
    for (auto& pending : buckets[i]) part.add(std::move(pending.user), pending.day, pending.point);
    buckets[i].clear();
    if (close_at) part.close_before(close_at);
  });
}

void StreamingAggregator::consume(std::istream& in) {
  if (finished_) throw InvalidInput("aggregator already finished");
  if (!in) throw InputError("event stream is not readable");
  std::vector<std::string> lines;
  std::vector<std::optional<LocatedEvent>> parsed;
  std::vector<std::string> errors;
  std::vector<std::vector<Pending>> buckets(partitions_.size());
  constexpr std::size_t kBlock = 1024;

  while (true) {
    lines.clear();
    std::string line;
    while (lines.size() < options_.chunk_lines && std::getline(in, line)) lines.push_back(std::move(line));
    if (lines.empty()) break;

    parsed.assign(lines.size(), std::nullopt);
    errors.assign(lines.size(), {});
    const std::size_t blocks = (lines.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, options_.threads, [&](std::size_t b) {
      const std::size_t end = std::min(lines.size(), (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) {
        if (!is_ignorable_line(lines[i])) parsed[i] = parse_event_line(lines[i], &errors[i]);
      }
    });

    for (std::size_t i = 0; i < lines.size(); ++i) {
      ++diagnostics_.lines;
      if (parsed[i]) {
        ++diagnostics_.records;
        route(*parsed[i], buckets);
      } else if (is_ignorable_line(lines[i])) {
        ++diagnostics_.ignored;
      } else {
        diagnostics_.record_malformed(diagnostics_.lines, errors[i]);
      }
    }
    apply(buckets);
  }
  if (in.bad()) throw InputError("failed reading event stream");
}

void StreamingAggregator::consume(const LocatedEvent& event) {
  if (finished_) throw InvalidInput("aggregator already finished");
  std::vector<std::vector<Pending>> buckets(partitions_.size());
  ++diagnostics_.records;
  route(event, buckets);
  apply(buckets);
}

std::vector<DailyRegionMetrics> StreamingAggregator::finish() {
  if (!finished_) {
    parallel_for(partitions_.size(), options_.threads, [&](std::size_t i) { partitions_[i]->close_before(std::nullopt); });
    finished_ = true;
  }
  DailyAccumulator total;
  StreamStats stats;
  for (const auto& part : partitions_) {
    total.merge(part->accumulator);
    stats.merge(part->stats);
  }
  stats.late_dropped = stats_.late_dropped;
  stats_ = stats;
  return total.finish(regions_);
}

}  // namespace mobidx
