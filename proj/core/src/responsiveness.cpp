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

#include "mobidx/responsiveness.hpp"

#include <algorithm>
#include <cmath>

#include "mobidx/error.hpp"

namespace mobidx {

namespace {

// Index into a signal of length n mirrored about both edges with the edge
// sample repeated; periodic with period 2n.
std::size_t reflect_index(std::int64_t i, std::int64_t n) {
  const std::int64_t period = 2 * n;
  std::int64_t m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

struct PairArea {
  double below = 0;  // contributes to s_aub
  double above = 0;  // contributes to s_aab
};

// Area of the deviation 1 - v over a unit step with linear interpolation,
// split at the crossing of 1 when the endpoints straddle it.
PairArea step_area(double v0, double v1) {
  const double f0 = 1.0 - v0;
  const double f1 = 1.0 - v1;
  if (f0 >= 0 && f1 >= 0) return {(f0 + f1) / 2, 0};
  if (f0 <= 0 && f1 <= 0) return {0, -(f0 + f1) / 2};
  const double t = f0 / (f0 - f1);
  if (f0 > 0) return {f0 * t / 2, -f1 * (1 - t) / 2};
  return {f1 * (1 - t) / 2, -f0 * t / 2};
}

}  // namespace

std::optional<double> SmoothedSeries::at(Date d) const {
  for (const auto& seg : segments) {
    if (d >= seg.first && d <= seg.last()) return seg.values[static_cast<std::size_t>(d - seg.first)];
  }
  return std::nullopt;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0) throw InvalidInput("Gaussian sigma must be positive");
  const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sigma));
  std::vector<double> half(radius + 1);
  for (std::size_t k = 0; k <= radius; ++k) {
    const double x = static_cast<double>(k);
    half[k] = std::exp(-0.5 * x * x / (sigma * sigma));
  }
  // Sum smallest first.
  double total = 0;
  for (std::size_t k = radius; k >= 1; --k) total += 2 * half[k];
  total += half[0];

  std::vector<double> kernel(2 * radius + 1);
  for (std::size_t k = 0; k <= radius; ++k) {
    kernel[radius + k] = half[k] / total;
    kernel[radius - k] = half[k] / total;
  }
  return kernel;
}

std::vector<double> convolve_reflect(std::span<const double> values, std::span<const double> kernel) {
  if (kernel.size() % 2 != 1) throw InvalidInput("kernel length must be odd");
  const auto n = static_cast<std::int64_t>(values.size());
  const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
  std::vector<double> out(values.size());
  for (std::int64_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::int64_t k = -radius; k <= radius; ++k) {
      acc += kernel[static_cast<std::size_t>(k + radius)] * values[reflect_index(i + k, n)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SmoothedSeries gaussian_smooth(const NmiSeries& series, const SmoothingConfig& config) {
  if (config.bridge_limit < 0) throw InvalidInput("bridge limit must be non-negative");
  const auto kernel = gaussian_kernel(config.sigma);

  SmoothedSeries out;
  out.region_id = series.region_id;
  out.metric = series.metric;

  std::vector<Segment> raw;
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const auto& s = series.samples[i];
    if (!std::isfinite(s.value) || s.value < 0) throw InvalidInput("NMI samples must be finite and non-negative");
    if (i == 0) {
      raw.push_back({s.date, {s.value}});
      continue;
    }
    const auto& prev = series.samples[i - 1];
    const std::int32_t missing = s.date - prev.date - 1;
    if (missing < 0) throw InvalidInput("NMI series dates must be strictly increasing");
    if (missing > config.bridge_limit) {
      raw.push_back({s.date, {s.value}});
      continue;
    }
    auto& seg = raw.back().values;
    for (std::int32_t g = 1; g <= missing; ++g) {
      seg.push_back(prev.value + (s.value - prev.value) * g / (missing + 1));
    }
    seg.push_back(s.value);
  }
  for (auto& seg : raw) {
    if (seg.values.empty()) continue;
    out.segments.push_back({seg.first, convolve_reflect(seg.values, kernel)});
  }
  return out;
}

AreaDecomposition area_decompose(const SmoothedSeries& smoothed, const DateRange& window) {
  AreaDecomposition d;
  bool usable = false;
  for (const auto& seg : smoothed.segments) {
    const Date from = std::max(seg.first, window.first);
    const Date to = std::min(seg.last(), window.last);
    if (to - from < 1) continue;
    usable = true;
    const auto begin = static_cast<std::size_t>(from - seg.first);
    const auto end = static_cast<std::size_t>(to - seg.first);
    for (std::size_t i = begin; i < end; ++i) {
      const auto a = step_area(seg.values[i], seg.values[i + 1]);
      d.s_aub += a.below;
      d.s_aab += a.above;
    }
    d.s_apc += static_cast<double>(end - begin);
  }
  if (!usable) {
    throw UndefinedMri("no segment with two samples in window " + window.label + " for " + smoothed.region_id);
  }
  return d;
}

double mri(const AreaDecomposition& decomp) {
  if (!(decomp.s_apc > 0)) throw UndefinedMri("perfect-scenario area is zero");
  // Bounded by 1 whenever the curve is non-negative; clamp summation rounding.
  return std::min((decomp.s_aub - decomp.s_aab) / decomp.s_apc, 1.0);
}

double integrated_mri(double mri_sd, double u_sd, double mri_cd, double u_cd) {
  if (u_sd < 0 || u_cd < 0) throw InvalidInput("sample-size weights must be non-negative");
  if (u_sd + u_cd <= 0) throw UndefinedMri("both sample-size weights are zero");
  if (u_cd == 0) return mri_sd;
  if (u_sd == 0) return mri_cd;
  const double v = (mri_sd * u_sd + mri_cd * u_cd) / (u_sd + u_cd);
  return std::clamp(v, std::min(mri_sd, mri_cd), std::max(mri_sd, mri_cd));
}

std::vector<DateRange> monthly_windows(const DateRange& range) {
  std::vector<DateRange> out;
  Date start = range.first;
  while (start <= range.last) {
    const int y = start.year();
    const unsigned m = start.month();
    const Date next_month = m == 12 ? Date::from_ymd(y + 1, 1, 1) : Date::from_ymd(y, m + 1, 1);
    const Date end = std::min(next_month - 1, range.last);
    out.push_back({start, end, month_label(start)});
    start = next_month;
  }
  return out;
}

WindowedReports windowed_reports(const SmoothedSeries& sd, const SmoothedSeries& cd,
                                 std::span<const DailyRegionMetrics> daily, std::span<const DateRange> windows) {
  WindowedReports out;
  std::optional<MriReport> prev;
  for (const auto& w : windows) {
    MriReport r;
    r.region_id = sd.region_id;
    r.window = w;
    for (const auto& row : daily) {
      if (row.region_id != sd.region_id || !w.contains(row.day)) continue;
      r.u_sd += row.n_sd;
      r.u_cd += row.n_cd;
    }
    try {
      r.mri_sd = mri(area_decompose(sd, w));
      r.mri_cd = mri(area_decompose(cd, w));
      r.mri_integrated =
          integrated_mri(r.mri_sd, static_cast<double>(r.u_sd), r.mri_cd, static_cast<double>(r.u_cd));
    } catch (const UndefinedMri&) {
      out.undefined_windows.push_back(w.label);
      prev.reset();
      continue;
    }
    if (prev) {
      r.delta_prev_sd = r.mri_sd - prev->mri_sd;
      r.delta_prev_cd = r.mri_cd - prev->mri_cd;
      r.delta_prev_integrated = r.mri_integrated - prev->mri_integrated;
    }
    prev = r;
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace mobidx
