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

#include "mobidx/regions.hpp"

#include <istream>
#include <sstream>

#include "mobidx/error.hpp"

namespace mobidx {

std::optional<RegionLevel> parse_region_level(std::string_view text) {
  if (text == "global") return RegionLevel::global;
  if (text == "country") return RegionLevel::country;
  if (text == "admin1") return RegionLevel::admin1;
  return std::nullopt;
}

std::string_view to_string(RegionLevel level) {
  switch (level) {
    case RegionLevel::global: return "global";
    case RegionLevel::country: return "country";
    case RegionLevel::admin1: return "admin1";
  }
  return "?";
}

std::vector<RegionBox> read_region_boxes(std::istream& in) {
  std::vector<RegionBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    RegionBox box;
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw ConfigError("region boxes line " + std::to_string(line_no) + ": expected 5 fields");
    }
    try {
      box.region_id = cells[0];
      box.min_lat = std::stod(cells[1]);
      box.min_lon = std::stod(cells[2]);
      box.max_lat = std::stod(cells[3]);
      box.max_lon = std::stod(cells[4]);
    } catch (const std::exception&) {
      throw ConfigError("region boxes line " + std::to_string(line_no) + ": bad number");
    }
    if (box.region_id.empty() || box.region_id == kGlobalRegionName || box.min_lat > box.max_lat ||
        box.min_lon > box.max_lon) {
      throw ConfigError("region boxes line " + std::to_string(line_no) + ": invalid box");
    }
    boxes.push_back(std::move(box));
  }
  if (in.bad()) throw InputError("failed reading region boxes");
  return boxes;
}

std::optional<std::string> region_name_for(const RegionTags& tags, RegionLevel level) {
  switch (level) {
    case RegionLevel::global:
      return std::nullopt;
    case RegionLevel::country:
      if (tags.country.empty()) return std::nullopt;
      return tags.country;
    case RegionLevel::admin1:
      if (tags.admin1.empty()) return std::nullopt;
      if (!tags.country.empty() && tags.admin1.starts_with(tags.country + "-")) return tags.admin1;
      if (tags.country.empty()) return tags.admin1;
      return tags.country + "-" + tags.admin1;
  }
  return std::nullopt;
}

RegionAssigner::RegionAssigner(RegionLevel level, std::vector<RegionBox> boxes)
    : level_(level), boxes_(std::move(boxes)) {
  region_names_.emplace_back(kGlobalRegionName);
  region_index_.emplace(std::string(kGlobalRegionName), kGlobalRegion);
  for (const auto& box : boxes_) box_regions_.push_back(intern_region(box.region_id));
}

RegionId RegionAssigner::intern_region(const std::string& name) {
  auto [it, inserted] = region_index_.try_emplace(name, static_cast<RegionId>(region_names_.size()));
  if (inserted) region_names_.push_back(name);
  return it->second;
}

TagId RegionAssigner::intern_tags(std::string_view country, std::string_view admin1) {
  std::string key;
  key.reserve(country.size() + admin1.size() + 1);
  key.append(country).push_back('\x1f');
  key.append(admin1);
  auto [it, inserted] = tag_index_.try_emplace(std::move(key), static_cast<TagId>(tags_.size()));
  if (inserted) {
    RegionTags t{std::string(country), std::string(admin1)};
    std::optional<RegionId> region;
    if (!uses_boxes()) {
      if (auto name = region_name_for(t, level_)) region = intern_region(*name);
    }
    tags_.push_back(std::move(t));
    tag_regions_.push_back(region);
  }
  return it->second;
}

std::optional<RegionId> RegionAssigner::region_of(GeoPoint anchor, TagId tag) const {
  if (level_ == RegionLevel::global) return std::nullopt;
  if (uses_boxes()) {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      if (boxes_[i].contains(anchor)) return box_regions_[i];
    }
    return std::nullopt;
  }
  return tag_regions_.at(tag);
}

}  // namespace mobidx
