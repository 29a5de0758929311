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

#include "mobidx/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mobidx/csv.hpp"
#include "mobidx/error.hpp"
#include "mobidx/parallel.hpp"

namespace mobidx {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + std::string(what) + " '" + path + "'");
  return in;
}

std::string weekday_list(const std::vector<int>& days) {
  std::string out;
  for (const int d : days) {
    if (!out.empty()) out += ' ';
    out += weekday_name(d);
  }
  return out;
}

std::string percent(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return "0%";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << 100.0 * static_cast<double>(part) / static_cast<double>(whole) << '%';
  return s.str();
}

struct RegionOutcome {
  std::optional<BaselineTable> sd_table, cd_table;
  std::optional<NmiSeries> nmi_sd, nmi_cd;
  std::optional<SmoothedSeries> smooth_sd, smooth_cd;
  std::vector<MriReport> reports;
  std::vector<std::string> undefined_windows;
  std::optional<RegionExclusion> exclusion;
  SampleSizes sizes;
};

}  // namespace

bool region_less(const std::string& a, const std::string& b) {
  const bool ga = a == kGlobalRegionName;
  const bool gb = b == kGlobalRegionName;
  if (ga != gb) return ga;
  return a < b;
}

std::string region_file_stem(const std::string& region_id) {
  std::string out = region_id;
  for (auto& c : out) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

IngestResult ingest_inputs(const RunConfig& config) {
  StreamOptions options;
  options.filter.min_precision = config.min_precision;
  if (!config.bot_denylist.empty()) {
    auto in = open_input(config.bot_denylist, "bot denylist");
    options.filter.denylist = SourceDenylist::read(in);
  }
  options.day_offset_hours = config.day_offset_hours;
  options.max_lateness_days = config.max_lateness_days;
  options.threads = static_cast<unsigned>(config.threads);

  std::vector<RegionBox> boxes;
  if (config.membership == Membership::bbox) {
    auto in = open_input(config.region_boxes, "region boxes");
    boxes = read_region_boxes(in);
    if (boxes.empty()) throw ConfigError("region boxes file lists no boxes");
  }
  RegionAssigner assigner(config.region_level, std::move(boxes));
  StreamingAggregator aggregator(options, assigner);
  for (const auto& path : config.inputs) {
    auto in = open_input(path, "input");
    aggregator.consume(in);
  }

  IngestResult result;
  result.daily = aggregator.finish();
  result.parse = aggregator.diagnostics();
  result.filters = aggregator.tallies();
  result.stream = aggregator.stats();
  for (const RegionId r : aggregator.regions_seen()) result.regions.push_back(assigner.region_name(r));
  std::sort(result.regions.begin(), result.regions.end(), region_less);
  return result;
}

void evaluate_regions(const RunConfig& config, RunArtifacts& art) {
  std::map<std::string, std::vector<DailyRegionMetrics>> by_region;
  for (const auto& row : art.daily) by_region[row.region_id].push_back(row);

  std::set<std::string> all(art.regions.begin(), art.regions.end());
  for (const auto& [r, rows] : by_region) all.insert(r);
  art.regions.assign(all.begin(), all.end());
  std::sort(art.regions.begin(), art.regions.end(), region_less);

  const BaselineConfig baseline_config{config.baseline, config.min_users_per_day, config.min_days_per_weekday};
  const SmoothingConfig smoothing{config.sigma, config.bridge_limit};
  const auto windows = config.report_windows();

  std::vector<RegionOutcome> outcomes(art.regions.size());
  parallel_for(art.regions.size(), static_cast<unsigned>(config.threads), [&](std::size_t i) {
    const auto& region = art.regions[i];
    auto& out = outcomes[i];
    const auto it = by_region.find(region);
    if (it == by_region.end()) {
      out.exclusion = RegionExclusion{region, std::string(kReasonNoEligibleUsers),
                                      "no user-day with two posts or consecutive-day posts"};
      return;
    }
    const auto& rows = it->second;
    for (const auto& row : rows) {
      if (config.baseline.contains(row.day)) {
        out.sizes.u_sd_baseline += row.n_sd;
        out.sizes.u_cd_baseline += row.n_cd;
      }
      if (config.evaluation.contains(row.day)) {
        out.sizes.u_sd_eval += row.n_sd;
        out.sizes.u_cd_eval += row.n_cd;
      }
    }
    out.sd_table = compute_baseline(region, Metric::sd, rows, baseline_config);
    out.cd_table = compute_baseline(region, Metric::cd, rows, baseline_config);
    if (!out.sd_table->complete() || !out.cd_table->complete()) {
      std::string detail;
      for (const auto* t : {&*out.sd_table, &*out.cd_table}) {
        if (t->complete()) continue;
        if (!detail.empty()) detail += "; ";
        detail += std::string(to_string(t->metric)) + " unsupported: " + weekday_list(t->missing_weekdays());
      }
      out.exclusion = RegionExclusion{region, std::string(kReasonIncompleteBaseline), detail};
      return;
    }
    out.nmi_sd = normalize(rows, *out.sd_table, config.evaluation);
    out.nmi_cd = normalize(rows, *out.cd_table, config.evaluation);
    out.smooth_sd = gaussian_smooth(*out.nmi_sd, smoothing);
    out.smooth_cd = gaussian_smooth(*out.nmi_cd, smoothing);
    auto reports = windowed_reports(*out.smooth_sd, *out.smooth_cd, rows, windows);
    out.reports = std::move(reports.rows);
    out.undefined_windows = std::move(reports.undefined_windows);
    if (out.reports.empty()) {
      out.exclusion = RegionExclusion{region, std::string(kReasonNoEvaluationCoverage), "no window with a defined MRI"};
    }
  });

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    const auto& region = art.regions[i];
    if (o.sd_table) art.baselines.push_back(std::move(*o.sd_table));
    if (o.cd_table) art.baselines.push_back(std::move(*o.cd_table));
    if (o.nmi_sd) art.nmi.push_back(std::move(*o.nmi_sd));
    if (o.nmi_cd) art.nmi.push_back(std::move(*o.nmi_cd));
    if (o.smooth_sd) art.smoothed.push_back(std::move(*o.smooth_sd));
    if (o.smooth_cd) art.smoothed.push_back(std::move(*o.smooth_cd));
    for (auto& r : o.reports) art.reports.push_back(std::move(r));
    if (!o.undefined_windows.empty()) art.undefined_windows[region] = std::move(o.undefined_windows);
    if (o.exclusion) art.exclusions.push_back(std::move(*o.exclusion));
    art.sample_sizes[region] = o.sizes;
  }
}

RunArtifacts run_pipeline(const RunConfig& config) {
  config.validate();
  RunArtifacts art;
  art.config = config;
  auto ingested = ingest_inputs(config);
  art.daily = std::move(ingested.daily);
  art.parse = std::move(ingested.parse);
  art.filters = ingested.filters;
  art.stream = ingested.stream;
  art.regions = std::move(ingested.regions);
  evaluate_regions(config, art);
  return art;
}

void write_artifacts(const RunArtifacts& art, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  using csv::format_double;
  using csv::format_optional;

  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "date", "mean_d_sd_km", "n_sd", "mean_d_cd_km", "n_cd"});
    for (const auto& r : art.daily) {
      csv::write_row(s, {r.region_id, to_string(r.day), format_optional(r.mean_d_sd), std::to_string(r.n_sd),
                         format_optional(r.mean_d_cd), std::to_string(r.n_cd)});
    }
    csv::write_file(dir / "daily_metrics.csv", s.str());
  }
  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "metric", "weekday", "baseline_km", "support"});
    for (const auto& t : art.baselines) {
      for (int w = 0; w < 7; ++w) {
        csv::write_row(s, {t.region_id, std::string(to_string(t.metric)), std::string(weekday_name(w)),
                           format_optional(t.values[w]), std::to_string(t.support[w])});
      }
    }
    csv::write_file(dir / "baselines.csv", s.str());
  }
  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "metric", "date", "raw_nmi", "n_users"});
    for (const auto& series : art.nmi) {
      for (const auto& x : series.samples) {
        csv::write_row(s, {series.region_id, std::string(to_string(series.metric)), to_string(x.date),
                           format_double(x.value), std::to_string(x.n_users)});
      }
    }
    csv::write_file(dir / "nmi_series.csv", s.str());
  }
  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "metric", "date", "smoothed_nmi"});
    for (const auto& series : art.smoothed) {
      for (const auto& seg : series.segments) {
        for (std::size_t k = 0; k < seg.values.size(); ++k) {
          csv::write_row(s, {series.region_id, std::string(to_string(series.metric)),
                             to_string(seg.first + static_cast<std::int32_t>(k)), format_double(seg.values[k])});
        }
      }
    }
    csv::write_file(dir / "nmi_smoothed.csv", s.str());
  }
  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "window_label", "mri_sd", "mri_cd", "u_sd", "u_cd", "mri_integrated",
                       "delta_prev_sd", "delta_prev_cd", "delta_prev_integrated"});
    for (const auto& r : art.reports) {
      csv::write_row(s, {r.region_id, r.window.label, format_double(r.mri_sd), format_double(r.mri_cd),
                         std::to_string(r.u_sd), std::to_string(r.u_cd), format_double(r.mri_integrated),
                         format_optional(r.delta_prev_sd), format_optional(r.delta_prev_cd),
                         format_optional(r.delta_prev_integrated)});
    }
    csv::write_file(dir / "mri_report.csv", s.str());
  }
  {
    std::ostringstream s;
    csv::write_row(s, {"region_id", "reason", "detail"});
    for (const auto& e : art.exclusions) csv::write_row(s, {e.region_id, e.reason, e.detail});
    csv::write_file(dir / "excluded_regions.csv", s.str());
  }
  emit_plot_data(art, dir);
  csv::write_file(dir / "summary.txt", render_summary(art));
}

void emit_plot_data(const RunArtifacts& art, const fs::path& dir) {
  const fs::path plots = dir / "plots";
  std::error_code ec;
  fs::create_directories(plots, ec);
  if (ec) throw InputError("cannot create " + plots.string() + ": " + ec.message());
  // Drop plot files from earlier runs so excluded regions never keep one.
  for (const auto& entry : fs::directory_iterator(plots)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") fs::remove(entry.path());
  }

  std::set<std::string> excluded;
  for (const auto& e : art.exclusions) excluded.insert(e.region_id);

  auto find_nmi = [&](const std::string& region, Metric m) -> const NmiSeries* {
    for (const auto& s : art.nmi) {
      if (s.region_id == region && s.metric == m) return &s;
    }
    return nullptr;
  };
  auto find_smoothed = [&](const std::string& region, Metric m) -> const SmoothedSeries* {
    for (const auto& s : art.smoothed) {
      if (s.region_id == region && s.metric == m) return &s;
    }
    return nullptr;
  };
  auto raw_at = [](const NmiSeries* s, Date d) -> std::optional<double> {
    if (!s) return std::nullopt;
    const auto it = std::lower_bound(s->samples.begin(), s->samples.end(), d,
                                     [](const NmiSample& x, Date v) { return x.date < v; });
    if (it == s->samples.end() || it->date != d) return std::nullopt;
    return it->value;
  };

  for (const auto& region : art.regions) {
    if (excluded.contains(region)) continue;
    const auto* raw_sd = find_nmi(region, Metric::sd);
    const auto* raw_cd = find_nmi(region, Metric::cd);
    const auto* sm_sd = find_smoothed(region, Metric::sd);
    const auto* sm_cd = find_smoothed(region, Metric::cd);
    if (!raw_sd || !raw_cd || !sm_sd || !sm_cd) continue;
    std::ostringstream s;
    csv::write_row(s, {"date", "nmi_sd", "smoothed_nmi_sd", "nmi_cd", "smoothed_nmi_cd", "baseline"});
    for (Date d = art.config.evaluation.first; d <= art.config.evaluation.last; ++d) {
      csv::write_row(s, {to_string(d), csv::format_optional(raw_at(raw_sd, d)), csv::format_optional(sm_sd->at(d)),
                         csv::format_optional(raw_at(raw_cd, d)), csv::format_optional(sm_cd->at(d)), "1"});
    }
    csv::write_file(plots / (region_file_stem(region) + ".csv"), s.str());
  }
}

std::string render_summary(const RunArtifacts& art) {
  std::ostringstream s;
  s << "mobidx run summary\n\n[config]\n";
  s << "input = ";
  for (std::size_t i = 0; i < art.config.inputs.size(); ++i) s << (i ? ", " : "") << art.config.inputs[i];
  s << '\n' << describe(art.config);

  const auto& p = art.parse;
  const auto& f = art.filters;
  const auto& st = art.stream;
  s << "\n[ingest]\n"
    << "lines = " << p.lines << '\n'
    << "records = " << p.records << '\n'
    << "ignored_lines = " << p.ignored << '\n'
    << "malformed_lines = " << p.malformed << " (" << percent(p.malformed, p.lines - p.ignored) << ")\n"
    << "dropped_precision = " << f.dropped_precision << " (" << percent(f.dropped_precision, p.records) << ")\n"
    << "dropped_source = " << f.dropped_source << " (" << percent(f.dropped_source, p.records) << ")\n"
    << "dropped_late = " << st.late_dropped << " (" << percent(st.late_dropped, p.records) << ")\n"
    << "kept = " << f.kept - st.late_dropped << '\n'
    << "user_day_tracks = " << st.tracks << '\n'
    << "single_point_tracks = " << st.single_point_tracks << '\n'
    << "antimeridian_tracks = " << st.antimeridian_tracks << '\n'
    << "sd_user_days = " << st.sd_user_days << '\n'
    << "cd_user_pairs = " << st.cd_user_pairs << '\n';
  for (const auto& sample : p.samples) s << "malformed: " << sample << '\n';

  s << "\n[regions]\n"
    << "regions_seen = " << art.regions.size() << '\n'
    << "regions_excluded = " << art.exclusions.size() << '\n'
    << "report_rows = " << art.reports.size() << '\n';

  s << "\n[excluded regions]\n";
  for (const auto& e : art.exclusions) s << e.region_id << '\t' << e.reason << '\t' << e.detail << '\n';

  s << "\n[undefined windows]\n";
  for (const auto& [region, labels] : art.undefined_windows) {
    s << region << '\t';
    for (std::size_t i = 0; i < labels.size(); ++i) s << (i ? " " : "") << labels[i];
    s << '\n';
  }

  s << "\n[sample sizes]\nregion_id\tu_sd_baseline\tu_cd_baseline\tu_sd_eval\tu_cd_eval\n";
  for (const auto& region : art.regions) {
    const auto it = art.sample_sizes.find(region);
    const SampleSizes z = it == art.sample_sizes.end() ? SampleSizes{} : it->second;
    s << region << '\t' << z.u_sd_baseline << '\t' << z.u_cd_baseline << '\t' << z.u_sd_eval << '\t' << z.u_cd_eval
      << '\n';
  }
  return s.str();
}

RunArtifacts run(const RunConfig& config) {
  auto art = run_pipeline(config);
  write_artifacts(art, config.out);
  return art;
}

}  // namespace mobidx
