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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobidx/baseline_nmi.hpp"
#include "mobidx/calendar.hpp"
#include "mobidx/daily_metrics.hpp"

namespace mobidx {

struct SmoothingConfig {
  double sigma = 2.0;   // days
  int bridge_limit = 3; // longest gap (missing days) filled by interpolation
};

/// Run of consecutive calendar days starting at `first`.
struct Segment {
  Date first;
  std::vector<double> values;

  Date last() const { return first + static_cast<std::int32_t>(values.size()) - 1; }
};

struct SmoothedSeries {
  std::string region_id;
  Metric metric = Metric::sd;
  std::vector<Segment> segments;

  std::optional<double> at(Date d) const;
};

/// Truncated Gaussian weights of radius ceil(4 sigma), normalized to unit sum.
/// Element `radius` is the center tap.
std::vector<double> gaussian_kernel(double sigma);

/// Convolves `values` with a symmetric kernel, mirroring the signal about its
/// edges (d c b a | a b c d | d c b a). Works for signals shorter than the
/// kernel radius.
std::vector<double> convolve_reflect(std::span<const double> values, std::span<const double> kernel);

/// Splits the series at gaps longer than the bridge limit, fills shorter gaps
/// linearly, and filters each segment independently.
SmoothedSeries gaussian_smooth(const NmiSeries& series, const SmoothingConfig& config = {});

struct AreaDecomposition {
  double s_aub = 0;  // area between the curve and NMI = 1 where the curve is below
  double s_aab = 0;  // same, where the curve is above
  double s_apc = 0;  // area for a curve pinned at zero over the covered length
};

/// Integrates 1 - value over the part of each segment inside `window`,
/// piecewise linearly between daily samples and split exactly at crossings
/// of 1. Throws UndefinedMri when no segment has two samples in the window.
AreaDecomposition area_decompose(const SmoothedSeries& smoothed, const DateRange& window);

/// (s_aub - s_aab) / s_apc. Throws UndefinedMri when s_apc is not positive.
double mri(const AreaDecomposition& decomp);

/// Sample-size weighted mean of the two MRIs. Throws UndefinedMri when both
/// weights are zero and InvalidInput for negative weights.
double integrated_mri(double mri_sd, double u_sd, double mri_cd, double u_cd);

struct MriReport {
  std::string region_id;
  DateRange window;
  double mri_sd = 0;
  double mri_cd = 0;
  std::int64_t u_sd = 0;
  std::int64_t u_cd = 0;
  double mri_integrated = 0;
  std::optional<double> delta_prev_sd;
  std::optional<double> delta_prev_cd;
  std::optional<double> delta_prev_integrated;
};

/// Calendar months overlapping [first, last], clipped to it, labeled "YYYY-MM".
std::vector<DateRange> monthly_windows(const DateRange& range);

struct WindowedReports {
  std::vector<MriReport> rows;
  /// Labels of windows where the region had no defined MRI.
  std::vector<std::string> undefined_windows;
};

/// One report row per window where both metrics have a defined MRI. Deltas are
/// taken against the previous window in `windows` when it produced a row.
/// `daily` supplies the region's per-day user counts for the weights.
WindowedReports windowed_reports(const SmoothedSeries& sd, const SmoothedSeries& cd,
                                 std::span<const DailyRegionMetrics> daily, std::span<const DateRange> windows);

}  // namespace mobidx
