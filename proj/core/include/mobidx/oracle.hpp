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

#include <cstddef>
#include <filesystem>

#include "mobidx/config.hpp"

namespace mobidx::oracle {

inline constexpr std::size_t kDefaultMaxEvents = 10000;

/// Recomputes every table of a pipeline run straight from the formulas and
/// writes daily_metrics.csv, baselines.csv, nmi_series.csv, nmi_smoothed.csv,
/// mri_report.csv and excluded_regions.csv into `dir`.
///
/// Shares no computation with the main pipeline: its own parsing checks,
/// extended-precision haversine and means, direct convolution with explicit
/// mirrored padding, and areas by fine numeric integration (1e-3 day steps)
/// instead of exact crossing splits. Events are processed without a lateness
/// horizon. Throws InputError when the corpus has more than `max_events`
/// records, and ConfigError for an invalid config.
void run(const RunConfig& config, const std::filesystem::path& dir, std::size_t max_events = kDefaultMaxEvents);

}  // namespace mobidx::oracle
