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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mobidx/geodesy.hpp"

namespace mobidx {

using RegionId = std::uint32_t;
using TagId = std::uint32_t;

inline constexpr RegionId kGlobalRegion = 0;
inline constexpr std::string_view kGlobalRegionName = "GLOBAL";

enum class RegionLevel { global, country, admin1 };

std::optional<RegionLevel> parse_region_level(std::string_view text);
std::string_view to_string(RegionLevel level);

/// Region tags carried by an input event. An empty admin1 means "null".
struct RegionTags {
  std::string country;
  std::string admin1;

  friend bool operator==(const RegionTags&, const RegionTags&) = default;
};

/// Axis-aligned lat/lon box naming a region, for corpora without tags.
struct RegionBox {
  std::string region_id;
  double min_lat = 0, min_lon = 0, max_lat = 0, max_lon = 0;

  bool contains(GeoPoint p) const noexcept {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

/// Reads "region_id,min_lat,min_lon,max_lat,max_lon" lines; '#' starts a comment.
std::vector<RegionBox> read_region_boxes(std::istream& in);

/// Region id for tags at a level: the country code, or "<country>-<admin1>"
/// (admin1 codes that already carry the country prefix are kept as is).
std::optional<std::string> region_name_for(const RegionTags& tags, RegionLevel level);

/// Interns region tags and region names, and answers which regional cell an
/// anchor point belongs to.
///
/// Interning (intern_tags) mutates and must happen from one thread;
/// region_of() is read-only and may run concurrently once interning for the
/// current phase has finished. Ids are assigned in first-seen order, so they
/// are deterministic for a fixed input order.
class RegionAssigner {
 public:
  explicit RegionAssigner(RegionLevel level, std::vector<RegionBox> boxes = {});

  RegionLevel level() const noexcept { return level_; }
  bool uses_boxes() const noexcept { return !boxes_.empty(); }

  TagId intern_tags(std::string_view country, std::string_view admin1);
  const RegionTags& tags(TagId id) const { return tags_.at(id); }

  /// Non-global region an anchor belongs to, if any. GLOBAL is implicit.
  std::optional<RegionId> region_of(GeoPoint anchor, TagId tag) const;

  const std::string& region_name(RegionId id) const { return region_names_.at(id); }
  std::size_t region_count() const noexcept { return region_names_.size(); }

 private:
  RegionId intern_region(const std::string& name);

  RegionLevel level_;
  std::vector<RegionBox> boxes_;
  std::vector<RegionId> box_regions_;

  std::vector<RegionTags> tags_;
  std::vector<std::optional<RegionId>> tag_regions_;
  std::unordered_map<std::string, TagId> tag_index_;

  std::vector<std::string> region_names_;
  std::unordered_map<std::string, RegionId> region_index_;
};

}  // namespace mobidx
