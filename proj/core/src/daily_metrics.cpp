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

#include "mobidx/daily_metrics.hpp"

#include <algorithm>

#include "mobidx/error.hpp"

namespace mobidx {

std::optional<double> single_day_distance(const UserDayTrack& track) {
  if (track.points.size() < 2) return std::nullopt;
  const GeoPoint initial = track.points.front().point;
  double best = 0.0;
  for (std::size_t m = 1; m < track.points.size(); ++m) {
    best = std::max(best, great_circle_distance(initial, track.points[m].point));
  }
  return best;
}

double cross_day_distance(const UserDayTrack& day_j, const UserDayTrack& day_j_plus_1) {
  if (day_j.user_id != day_j_plus_1.user_id) {
    throw InvalidInput("cross-day distance between different users");
  }
  if (day_j_plus_1.day - day_j.day != 1) {
    throw InvalidInput("cross-day distance needs consecutive days, got " + to_string(day_j.day) + " and " +
                       to_string(day_j_plus_1.day));
  }
  if (day_j.points.empty() || day_j_plus_1.points.empty()) throw InvalidInput("empty track");
  const auto a = day_j.positions();
  const auto b = day_j_plus_1.positions();
  return great_circle_distance(mean_center(a), mean_center(b));
}

TagId mean_center_tag(const UserDayTrack& track) {
  if (track.points.empty()) throw InvalidInput("empty track");
  // Compare 2*ts against first+last to stay in integers.
  const Timestamp twice_mid = track.points.front().ts + track.points.back().ts;
  const TrackPoint* best = &track.points.front();
  Timestamp best_gap = -1;
  for (const auto& p : track.points) {
    const Timestamp gap = twice_mid > 2 * p.ts ? twice_mid - 2 * p.ts : 2 * p.ts - twice_mid;
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best = &p;
    }
  }
  return best->tag;
}

std::vector<UserDayDistances> compute_user_distances(std::span<const UserDayTrack> tracks) {
  std::vector<UserDayDistances> out;
  out.reserve(tracks.size());
  std::vector<GeoPoint> centers;
  centers.reserve(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& t = tracks[i];
    if (t.points.empty()) throw InvalidInput("empty track");
    if (i > 0) {
      const auto& prev = tracks[i - 1];
      if (prev.user_id > t.user_id || (prev.user_id == t.user_id && prev.day >= t.day)) {
        throw InvalidInput("tracks are not ordered by (user, day)");
      }
    }
    UserDayDistances rec;
    rec.user_id = t.user_id;
    rec.day = t.day;
    rec.d_sd = single_day_distance(t);
    rec.anchor_sd = t.points.front().point;
    rec.sd_tag = t.points.front().tag;
    const auto pos = t.positions();
    rec.anchor_cd = mean_center(pos);
    rec.cd_tag = mean_center_tag(t);
    out.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    if (tracks[i].user_id == tracks[i + 1].user_id && tracks[i + 1].day - tracks[i].day == 1) {
      out[i].d_cd = great_circle_distance(out[i].anchor_cd, out[i + 1].anchor_cd);
    }
  }
  return out;
}

void DailyAccumulator::add_single_day(RegionId region, Date day, double distance) {
  auto& c = cells_[{region, day}];
  c.sum_sd += distance;
  ++c.n_sd;
}

void DailyAccumulator::add_cross_day(RegionId region, Date day, double distance) {
  auto& c = cells_[{region, day}];
  c.sum_cd += distance;
  ++c.n_cd;
}

void DailyAccumulator::add(const UserDayDistances& record, const RegionAssigner& regions) {
  if (record.d_sd) {
    add_single_day(kGlobalRegion, record.day, *record.d_sd);
    if (auto r = regions.region_of(record.anchor_sd, record.sd_tag)) add_single_day(*r, record.day, *record.d_sd);
  }
  if (record.d_cd) {
    add_cross_day(kGlobalRegion, record.day, *record.d_cd);
    if (auto r = regions.region_of(record.anchor_cd, record.cd_tag)) add_cross_day(*r, record.day, *record.d_cd);
  }
}

void DailyAccumulator::merge(const DailyAccumulator& other) {
  for (const auto& [key, cell] : other.cells_) {
    auto& c = cells_[key];
    c.sum_sd += cell.sum_sd;
    c.n_sd += cell.n_sd;
    c.sum_cd += cell.sum_cd;
    c.n_cd += cell.n_cd;
  }
}

std::vector<DailyRegionMetrics> DailyAccumulator::finish(const RegionAssigner& regions) const {
  std::vector<DailyRegionMetrics> rows;
  rows.reserve(cells_.size());
  for (const auto& [key, c] : cells_) {
    if (c.n_sd == 0 && c.n_cd == 0) continue;
    DailyRegionMetrics row;
    row.region_id = regions.region_name(key.first);
    row.day = key.second;
    row.n_sd = c.n_sd;
    row.n_cd = c.n_cd;
    if (c.n_sd > 0) row.mean_d_sd = c.sum_sd / static_cast<double>(c.n_sd);
    if (c.n_cd > 0) row.mean_d_cd = c.sum_cd / static_cast<double>(c.n_cd);
    rows.push_back(std::move(row));
  }
  sort_daily(rows);
  return rows;
}

void sort_daily(std::vector<DailyRegionMetrics>& rows) {
  std::sort(rows.begin(), rows.end(), [](const DailyRegionMetrics& a, const DailyRegionMetrics& b) {
    const bool ga = a.region_id == kGlobalRegionName;
    const bool gb = b.region_id == kGlobalRegionName;
    if (ga != gb) return ga;
    if (a.region_id != b.region_id) return a.region_id < b.region_id;
    return a.day < b.day;
  });
}

std::vector<DailyRegionMetrics> aggregate_daily(std::span<const UserDayDistances> records,
                                                const RegionAssigner& regions) {
  DailyAccumulator acc;
  for (const auto& r : records) acc.add(r, regions);
  return acc.finish(regions);
}

}  // namespace mobidx
