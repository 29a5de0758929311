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

#include "mobidx/verify.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "mobidx/csv.hpp"

namespace mobidx {

namespace {

enum class Rule { exact, distance, nmi, mri };

struct ColumnRule {
  const char* name;
  Rule rule;
};

struct TableSpec {
  const char* file;
  std::vector<const char*> key;
  std::vector<ColumnRule> values;
};

const std::vector<TableSpec>& specs() {
  static const std::vector<TableSpec> all = {
      {"daily_metrics.csv",
       {"region_id", "date"},
       {{"mean_d_sd_km", Rule::distance}, {"n_sd", Rule::exact}, {"mean_d_cd_km", Rule::distance}, {"n_cd", Rule::exact}}},
      {"baselines.csv",
       {"region_id", "metric", "weekday"},
       {{"baseline_km", Rule::distance}, {"support", Rule::exact}}},
      {"nmi_series.csv", {"region_id", "metric", "date"}, {{"raw_nmi", Rule::nmi}, {"n_users", Rule::exact}}},
      {"nmi_smoothed.csv", {"region_id", "metric", "date"}, {{"smoothed_nmi", Rule::nmi}}},
      {"mri_report.csv",
       {"region_id", "window_label"},
       {{"mri_sd", Rule::mri},
        {"mri_cd", Rule::mri},
        {"u_sd", Rule::exact},
        {"u_cd", Rule::exact},
        {"mri_integrated", Rule::mri},
        {"delta_prev_sd", Rule::mri},
        {"delta_prev_cd", Rule::mri},
        {"delta_prev_integrated", Rule::mri}}},
      {"excluded_regions.csv", {"region_id"}, {{"reason", Rule::exact}}},
  };
  return all;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

bool agrees(const std::string& a, const std::string& e, Rule rule, const Tolerances& tol) {
  if (a == e) return true;
  if (rule == Rule::exact || a.empty() || e.empty()) return false;
  const auto x = to_number(a);
  const auto y = to_number(e);
  if (!x || !y) return false;
  const double gap = std::fabs(*x - *y);
  switch (rule) {
    case Rule::mri: return gap <= tol.mri_abs;
    case Rule::distance: return gap <= tol.abs_floor || gap <= tol.distance_rel * std::fabs(*y);
    case Rule::nmi: return gap <= tol.abs_floor || gap <= tol.nmi_rel * std::fabs(*y);
    case Rule::exact: break;
  }
  return false;
}

using Keyed = std::map<std::string, std::vector<std::string>>;

Keyed index(const csv::Table& t, const TableSpec& spec, const std::string& which, VerifyReport& report) {
  std::vector<std::size_t> key_cols, value_cols;
  for (const auto* k : spec.key) key_cols.push_back(t.column(k));
  for (const auto& v : spec.values) value_cols.push_back(t.column(v.name));
  Keyed out;
  for (const auto& row : t.rows) {
    std::string key;
    for (const auto c : key_cols) key += (key.empty() ? "" : "/") + (c < row.size() ? row[c] : std::string{});
    std::vector<std::string> values;
    for (const auto c : value_cols) values.push_back(c < row.size() ? row[c] : std::string{});
    if (!out.emplace(key, std::move(values)).second) {
      report.mismatches.push_back({spec.file, key, "", "duplicate row in " + which, ""});
    }
  }
  return out;
}

}  // namespace

VerifyReport verify_outputs(const std::filesystem::path& actual, const std::filesystem::path& expected,
                            const Tolerances& tol) {
  VerifyReport report;
  for (const auto& spec : specs()) {
    const auto a = index(csv::read_table(actual / spec.file), spec, "actual", report);
    const auto e = index(csv::read_table(expected / spec.file), spec, "expected", report);
    ++report.tables;
    for (const auto& [key, values] : e) {
      const auto it = a.find(key);
      if (it == a.end()) {
        report.mismatches.push_back({spec.file, key, "", "<missing>", "row"});
        continue;
      }
      ++report.rows;
      for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (!agrees(it->second[i], values[i], spec.values[i].rule, tol)) {
          report.mismatches.push_back({spec.file, key, spec.values[i].name, it->second[i], values[i]});
        }
      }
    }
    for (const auto& [key, values] : a) {
      if (!e.contains(key)) report.mismatches.push_back({spec.file, key, "", "row", "<missing>"});
    }
  }
  return report;
}

std::string render(const VerifyReport& report, std::size_t max_listed) {
  std::ostringstream s;
  s << "compared " << report.tables << " tables, " << report.rows << " rows: ";
  if (report.ok()) {
    s << "match\n";
    return s.str();
  }
  s << report.mismatches.size() << " mismatches\n";
  for (std::size_t i = 0; i < report.mismatches.size() && i < max_listed; ++i) {
    const auto& m = report.mismatches[i];
    s << "  " << m.table << " [" << m.key << "]";
    if (!m.column.empty()) s << ' ' << m.column;
    s << ": actual=" << m.actual << " expected=" << m.expected << '\n';
  }
  return s.str();
}

}  // namespace mobidx
