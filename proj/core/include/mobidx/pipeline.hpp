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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mobidx/baseline_nmi.hpp"
#include "mobidx/config.hpp"
#include "mobidx/daily_metrics.hpp"
#include "mobidx/ingest.hpp"
#include "mobidx/responsiveness.hpp"
#include "mobidx/stream.hpp"

namespace mobidx {

inline constexpr std::string_view kReasonIncompleteBaseline = "incomplete baseline";
inline constexpr std::string_view kReasonNoEligibleUsers = "no eligible users";
inline constexpr std::string_view kReasonNoEvaluationCoverage = "no evaluation coverage";

struct RegionExclusion {
  std::string region_id;
  std::string reason;  // one of the kReason* constants
  std::string detail;
};

/// Sample sizes per region, the shape of a "user count for distance
/// calculation" table.
struct SampleSizes {
  std::int64_t u_sd_baseline = 0;
  std::int64_t u_cd_baseline = 0;
  std::int64_t u_sd_eval = 0;
  std::int64_t u_cd_eval = 0;
};

/// Everything a run produces, before anything touches the filesystem.
struct RunArtifacts {
  RunConfig config;
  ParseDiagnostics parse;
  FilterTallies filters;
  StreamStats stream;

  std::vector<DailyRegionMetrics> daily;
  std::vector<BaselineTable> baselines;
  std::vector<NmiSeries> nmi;
  std::vector<SmoothedSeries> smoothed;
  std::vector<MriReport> reports;
  std::vector<RegionExclusion> exclusions;
  /// Every region kept events resolved to, GLOBAL first then sorted.
  std::vector<std::string> regions;
  std::map<std::string, std::vector<std::string>> undefined_windows;
  std::map<std::string, SampleSizes> sample_sizes;
};

/// Ingest the configured inputs into per-region daily metrics.
struct IngestResult {
  std::vector<DailyRegionMetrics> daily;
  ParseDiagnostics parse;
  FilterTallies filters;
  StreamStats stream;
  std::vector<std::string> regions;
};
IngestResult ingest_inputs(const RunConfig& config);

/// Baselines, NMI, smoothing and reports for every region in `daily`.
/// `regions` lists regions seen in the input; regions without daily rows are
/// excluded with kReasonNoEligibleUsers.
void evaluate_regions(const RunConfig& config, RunArtifacts& artifacts);

/// Validates the config, then ingests and evaluates. Writes nothing.
RunArtifacts run_pipeline(const RunConfig& config);

/// Writes the CSV tables, plot data and summary.txt into `dir`.
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// One CSV per reported region under dir/plots: date, raw and smoothed NMI for
/// both metrics, and a constant baseline column, one row per evaluation day.
void emit_plot_data(const RunArtifacts& artifacts, const std::filesystem::path& dir);

std::string render_summary(const RunArtifacts& artifacts);

/// run_pipeline() followed by write_artifacts() into config.out.
RunArtifacts run(const RunConfig& config);

/// Region ids sort with GLOBAL first.
bool region_less(const std::string& a, const std::string& b);

/// Safe file stem for a region id.
std::string region_file_stem(const std::string& region_id);

}  // namespace mobidx
