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

// Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.
//
//   mobidx_acceptance <path-to-mobidx-cli> [scratch-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mobidx/csv.hpp"
#include "mobidx/error.hpp"
#include "mobidx/geodesy.hpp"
#include "mobidx/oracle.hpp"
#include "mobidx/pipeline.hpp"
#include "mobidx/responsiveness.hpp"
#include "mobidx/synth.hpp"
#include "mobidx/verify.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace mobidx;
using mobidx::testing::directory_digest;
using mobidx::testing::reference_distance_km;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Date ymd(int y, unsigned m, unsigned d) { return Date::from_ymd(y, m, d); }

fs::path write_corpus(const fs::path& path, const synth::ScenarioConfig& sc) {
  std::ofstream out(path, std::ios::binary);
  synth::generate(sc, out);
  return path;
}

std::size_t count_records(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty() && line[0] != '#';
  return n;
}

// Two equal-weight regions, one home per user, posting every day.
synth::ScenarioConfig two_region_scenario(std::uint64_t seed, std::int64_t users, Date first, Date last) {
  synth::ScenarioConfig c;
  c.seed = seed;
  c.n_users = users;
  c.dates = {first, last, {}};
  c.regions = {{"US", "NY", 40.5, 41.0, -74.5, -73.5, 1.0}, {"FR", "IDF", 48.6, 49.0, 2.0, 2.6, 1.0}};
  c.posts_min = 2;
  c.posts_max = 4;
  c.post_probability = 1.0;
  c.base_radius_km = 10.0;
  return c;
}

RunConfig paper_windows(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.inputs = {input.string()};
  c.baseline = {ymd(2020, 1, 13), ymd(2020, 2, 29), "baseline"};
  c.evaluation = {ymd(2020, 3, 1), ymd(2020, 5, 31), "evaluation"};
  c.out = out.string();
  return c;
}

double mean_nmi(const RunArtifacts& art, const std::string& region, Metric m, DateRange within) {
  double sum = 0;
  int n = 0;
  for (const auto& s : art.nmi) {
    if (s.region_id != region || s.metric != m) continue;
    for (const auto& x : s.samples) {
      if (!within.contains(x.date)) continue;
      sum += x.value;
      ++n;
    }
  }
  return n ? sum / n : std::nan("");
}

std::map<std::string, std::int64_t> users_per_region(const synth::ScenarioConfig& sc) {
  std::map<std::string, std::int64_t> out;
  std::map<std::string, std::string> region_of_user;
  for (const auto& e : synth::generate_events(sc)) region_of_user.emplace(e.user_id, e.country);
  for (const auto& [u, r] : region_of_user) ++out[r];
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac1_geodesy() {
  Outcome o;
  Timer t;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    const double ref = reference_distance_km(a.lat, a.lon, b.lat, b.lon);
    const double got = great_circle_distance(a, b);
    worst = std::max(worst, std::abs(got - ref) / ref);
  }
  double exact_err = 0;
  const std::vector<std::pair<GeoPoint, GeoPoint>> antipodes{
      {{0, 0}, {0, 180}}, {{30, 40}, {-30, -140}}, {{90, 0}, {-90, 0}}, {{-12.5, 170.25}, {12.5, -9.75}}};
  for (const auto& [a, b] : antipodes) {
    exact_err = std::max(exact_err, std::abs(great_circle_distance(a, b) - reference_distance_km(a.lat, a.lon, b.lat, b.lon)));
    exact_err = std::max(exact_err, std::abs(great_circle_distance(a, b) - std::numbers::pi * kEarthMeanRadiusKm));
  }
  for (int i = 0; i < 100; ++i) {
    const GeoPoint p{lat(rng), lon(rng)};
    exact_err = std::max(exact_err, std::abs(great_circle_distance(p, p)));
  }
  const double secs = t.seconds();
  o.pass = worst <= 1e-6 && exact_err <= 1e-9 && secs < 1.0;
  o.detail = "max rel err " + fmt(worst) + " over 1000 pairs; antipodal/identical max abs err " + fmt(exact_err) +
             " km; " + fmt(secs) + " s";
  return o;
}

// The 10k-event corpus shared by AC2 and AC7.
synth::ScenarioConfig oracle_scale_scenario() {
  auto c = two_region_scenario(20200313, 1000, ymd(2020, 1, 13), ymd(2020, 3, 12));
  c.posts_min = 1;
  c.posts_max = 2;
  c.post_probability = 0.1;
  c.radius_schedule = {{{ymd(2020, 3, 1), ymd(2020, 3, 12), {}}, 5.0}};
  c.coarse_fraction = 0.02;
  return c;
}

RunConfig oracle_scale_config(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.inputs = {input.string()};
  c.baseline = {ymd(2020, 1, 13), ymd(2020, 2, 29), "baseline"};
  c.evaluation = {ymd(2020, 3, 1), ymd(2020, 3, 12), "evaluation"};
  c.region_level = RegionLevel::admin1;
  c.min_users_per_day = 2;
  c.out = out.string();
  return c;
}

Outcome ac2_oracle(const fs::path& scratch) {
  Outcome o;
  Timer t;
  const auto input = write_corpus(scratch / "oracle_scale.jsonl", oracle_scale_scenario());
  const std::size_t records = count_records(input);
  const auto cfg = oracle_scale_config(input, scratch / "ac2_pipeline");
  const auto art = run(cfg);
  oracle::run(cfg, scratch / "ac2_oracle");
  const auto report = verify_outputs(scratch / "ac2_pipeline", scratch / "ac2_oracle");
  const double secs = t.seconds();
  o.pass = report.ok() && records <= oracle::kDefaultMaxEvents && records >= 6000 && art.reports.size() == 3 &&
           secs < 60;
  o.detail = std::to_string(records) + " events, " + std::to_string(report.rows) + " rows compared, " +
             std::to_string(report.mismatches.size()) + " mismatches, " + std::to_string(art.reports.size()) +
             " report rows; " + fmt(secs) + " s";
  if (!report.ok()) o.detail += "\n" + render(report, 5);
  return o;
}

Outcome ac3_trivial(const fs::path& scratch) {
  Outcome o;
  Timer t;
  const auto sc = two_region_scenario(3, 1200, ymd(2020, 1, 13), ymd(2020, 5, 31));
  const auto counts = users_per_region(sc);
  const auto input = write_corpus(scratch / "stationary.jsonl", sc);
  const auto art = run(paper_windows(input, scratch / "ac3_stationary"));

  double worst_nmi = 0, worst_mri = 0;
  std::int64_t fewest_users = INT64_MAX;
  for (const auto& region : {std::string("US"), std::string("FR")}) {
    fewest_users = std::min(fewest_users, counts.at(region));
    for (const auto m : {Metric::sd, Metric::cd}) {
      worst_nmi = std::max(worst_nmi, std::abs(mean_nmi(art, region, m, art.config.evaluation) - 1.0));
    }
  }
  int rows = 0;
  for (const auto& r : art.reports) {
    if (r.region_id == "GLOBAL") continue;
    ++rows;
    worst_mri = std::max({worst_mri, std::abs(r.mri_sd), std::abs(r.mri_cd), std::abs(r.mri_integrated)});
  }
  const bool stationary_ok = worst_nmi <= 0.05 && worst_mri <= 0.05 && rows == 6 && fewest_users >= 500;

  auto frozen = sc;
  frozen.radius_schedule = {{{ymd(2020, 3, 1), ymd(2020, 5, 31), {}}, 0.0}};
  const auto frozen_input = write_corpus(scratch / "frozen.jsonl", frozen);
  const auto frozen_art = run(paper_windows(frozen_input, scratch / "ac3_frozen"));
  // NMI_cd pairs day j with j + 1, so the corpus's last day has no cd sample.
  double worst_zero = 0, worst_one = 0;
  std::size_t covered = 0;
  for (const auto& s : frozen_art.nmi) {
    for (const auto& x : s.samples) {
      worst_zero = std::max(worst_zero, std::abs(x.value));
      ++covered;
    }
  }
  for (const auto& r : frozen_art.reports) {
    worst_one = std::max({worst_one, std::abs(r.mri_sd - 1), std::abs(r.mri_cd - 1), std::abs(r.mri_integrated - 1)});
  }
  const bool frozen_ok = worst_zero == 0 && covered == 3 * (92 + 91) && worst_one <= 1e-9 && frozen_art.reports.size() == 9;

  const double secs = t.seconds();
  o.pass = stationary_ok && frozen_ok;
  o.detail = "stationary: max |mean NMI - 1| " + fmt(worst_nmi) + ", max |MRI| " + fmt(worst_mri) + ", min " +
             std::to_string(fewest_users) + " users/region; radius zero: max |NMI| " + fmt(worst_zero) + " on " +
             std::to_string(covered) + " region-metric-days, max |MRI - 1| " + fmt(worst_one) + "; " + fmt(secs) +
             " s";
  return o;
}

Outcome ac4_halved(const fs::path& scratch) {
  Outcome o;
  Timer t;
  auto sc = two_region_scenario(4, 1200, ymd(2020, 1, 13), ymd(2020, 5, 31));
  sc.radius_schedule = {{{ymd(2020, 3, 1), ymd(2020, 5, 31), {}}, sc.base_radius_km / 2}};
  const auto counts = users_per_region(sc);
  const auto input = write_corpus(scratch / "halved.jsonl", sc);
  const auto art = run(paper_windows(input, scratch / "ac4_halved"));

  double lo_nmi = 1e9, hi_nmi = -1e9, lo_mri = 1e9, hi_mri = -1e9;
  std::int64_t fewest_users = INT64_MAX;
  for (const auto& region : {std::string("US"), std::string("FR")}) {
    fewest_users = std::min(fewest_users, counts.at(region));
    const double m = mean_nmi(art, region, Metric::sd, art.config.evaluation);
    lo_nmi = std::min(lo_nmi, m);
    hi_nmi = std::max(hi_nmi, m);
  }
  int rows = 0;
  for (const auto& r : art.reports) {
    if (r.region_id == "GLOBAL") continue;
    ++rows;
    lo_mri = std::min({lo_mri, r.mri_sd, r.mri_cd, r.mri_integrated});
    hi_mri = std::max({hi_mri, r.mri_sd, r.mri_cd, r.mri_integrated});
  }
  const double secs = t.seconds();
  o.pass = lo_nmi >= 0.4 && hi_nmi <= 0.6 && lo_mri >= 0.4 && hi_mri <= 0.6 && rows == 6 && fewest_users >= 500;
  o.detail = "in-period mean NMI_sd in [" + fmt(lo_nmi) + ", " + fmt(hi_nmi) + "], monthly MRI in [" + fmt(lo_mri) +
             ", " + fmt(hi_mri) + "] over " + std::to_string(rows) + " region-months, min " +
             std::to_string(fewest_users) + " users/region; " + fmt(secs) + " s";
  return o;
}

Outcome ac5_mri_invariants() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> level(0.0, 2.5), wiggle(-0.4, 0.4), unit(0.0, 1.0);
  std::uniform_int_distribution<int> len(2, 92);
  const Date first = ymd(2020, 3, 1);
  double max_mri = -1e9;
  int integrated_violations = 0, evaluated = 0;
  for (int i = 0; i < 1000; ++i) {
    NmiSeries s{"R", Metric::sd, {}};
    const int n = len(rng);
    const double base = level(rng);
    for (int d = 0; d < n; ++d) {
      if (unit(rng) < 0.1) continue;  // occasional gaps, some long enough to split
      double v = std::max(0.0, base + wiggle(rng));
      if (i % 10 == 0) v *= 1e-9;  // near the perfect scenario
      s.samples.push_back({first + d, v, 1});
    }
    const auto smoothed = gaussian_smooth(s);
    double m = 0;
    try {
      m = mri(area_decompose(smoothed, {first, first + 91, "w"}));
    } catch (const UndefinedMri&) {
      continue;
    }
    ++evaluated;
    max_mri = std::max(max_mri, m);
    const double other = 1.0 - 2.0 * unit(rng);
    const double x = integrated_mri(m, unit(rng) * 1000, other, unit(rng) * 1000);
    integrated_violations += x < std::min(m, other) || x > std::max(m, other);
  }
  auto constant_mri = [&](double c, int n) {
    NmiSeries s{"R", Metric::sd, {}};
    for (int d = 0; d < n; ++d) s.samples.push_back({first + d, c, 1});
    return mri(area_decompose(gaussian_smooth(s), {first, first + n - 1, "w"}));
  };
  double one_err = 0, half_err = 0;
  for (const int n : {2, 7, 31, 92}) {
    one_err = std::max(one_err, std::abs(constant_mri(1.0, n)));
    half_err = std::max(half_err, std::abs(constant_mri(1.5, n) + 0.5));
  }
  o.pass = max_mri <= 1 + 1e-12 && one_err <= 1e-12 && half_err <= 1e-12 && integrated_violations == 0 &&
           evaluated >= 900;
  o.detail = std::to_string(evaluated) + " random series, max MRI " + fmt(max_mri) + "; constant 1 |MRI| " +
             fmt(one_err) + "; constant 1.5 |MRI + 0.5| " + fmt(half_err) + "; integrated out of range " +
             std::to_string(integrated_violations);
  return o;
}

Outcome ac6_smoothing() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> value(0.0, 3.0), slope(-0.05, 0.05);
  std::uniform_int_distribution<int> len(1, 120);
  double const_err = 0, mass_err = 0, ramp_err = 0, impulse_err = 0;
  for (const double sigma : {0.5, 1.0, 2.0, 3.5}) {
    const auto k = gaussian_kernel(sigma);
    double mass = 0;
    for (const double w : k) mass += w;
    mass_err = std::max(mass_err, std::abs(mass - 1));
  }
  const auto kernel = gaussian_kernel(2.0);
  for (int i = 0; i < 200; ++i) {
    const double c = value(rng);
    const std::vector<double> xs(static_cast<std::size_t>(len(rng)), c);
    for (const double y : convolve_reflect(xs, kernel)) const_err = std::max(const_err, std::abs(y - c));

    const double a = value(rng), b = slope(rng);
    std::vector<double> ramp(60);
    for (std::size_t j = 0; j < ramp.size(); ++j) ramp[j] = a + b * static_cast<double>(j);
    const auto y = convolve_reflect(ramp, kernel);
    for (std::size_t j = 8; j + 8 < ramp.size(); ++j) ramp_err = std::max(ramp_err, std::abs(y[j] - ramp[j]));
  }
  // Kernel built independently: truncated at ceil(4 sigma), renormalized, long double.
  std::vector<long double> ref;
  long double total = 0;
  for (int j = -8; j <= 8; ++j) {
    ref.push_back(std::exp(-static_cast<long double>(j * j) / 8.0L));
    total += ref.back();
  }
  std::vector<double> impulse(33, 0.0);
  impulse[16] = 1.0;
  const auto response = convolve_reflect(impulse, kernel);
  for (std::size_t j = 0; j < response.size(); ++j) {
    const long double expected = (j >= 8 && j <= 24) ? ref[j - 8] / total : 0.0L;
    impulse_err = std::max(impulse_err, static_cast<double>(std::abs(response[j] - expected)));
  }
  o.pass = const_err <= 1e-12 && mass_err <= 1e-12 && ramp_err <= 1e-9 && impulse_err <= 1e-12;
  o.detail = "constant err " + fmt(const_err) + ", kernel mass err " + fmt(mass_err) + ", ramp interior err " +
             fmt(ramp_err) + ", impulse err " + fmt(impulse_err);
  return o;
}

Outcome ac7_determinism(const fs::path& scratch, const std::string& cli) {
  Outcome o;
  Timer t;
  const auto input = scratch / "oracle_scale.jsonl";
  if (!fs::exists(input)) write_corpus(input, oracle_scale_scenario());
  std::map<int, std::uint64_t> digests;
  std::map<int, int> codes;
  for (const int threads : {1, 8}) {
    const auto out = scratch / ("ac7_threads" + std::to_string(threads));
    fs::remove_all(out);
    const std::string cmd = "\"" + cli + "\" run --input \"" + input.string() + "\" --baseline-start 2020-01-13" +
                            " --baseline-end 2020-02-29 --eval-start 2020-03-01 --eval-end 2020-03-12" +
                            " --region-level admin1 --min-users-per-day 2 --threads " + std::to_string(threads) +
                            " --out \"" + out.string() + "\" 2>/dev/null";
    codes[threads] = std::system(cmd.c_str());
    digests[threads] = fs::exists(out / "mri_report.csv") ? directory_digest(out) : 0;
  }
  const double secs = t.seconds();
  o.pass = codes[1] == 0 && codes[8] == 0 && digests[1] != 0 && digests[1] == digests[8] && secs < 120;
  char buf[96];
  std::snprintf(buf, sizeof buf, "digest threads=1 %016llx, threads=8 %016llx",
                static_cast<unsigned long long>(digests[1]), static_cast<unsigned long long>(digests[8]));
  o.detail = std::string(buf) + "; " + fmt(secs) + " s";
  return o;
}

Outcome ac8_exclusion(const fs::path& scratch) {
  Outcome o;
  auto sc = two_region_scenario(8, 600, ymd(2020, 1, 13), ymd(2020, 3, 31));
  sc.regions = {{"US", "NY", 40.5, 41.0, -74.5, -73.5, 1.0}, {"US", "VT", 43.5, 44.5, -73.2, -72.2, 1.0}};
  const auto full = write_corpus(scratch / "ac8_full.jsonl", sc);

  // Drop every Vermont event on baseline Wednesdays.
  std::ifstream in(full);
  std::ofstream out(scratch / "ac8.jsonl", std::ios::binary);
  std::string line;
  std::size_t removed = 0;
  while (std::getline(in, line)) {
    if (line.find("\"admin1\":\"VT\"") != std::string::npos) {
      const auto ev = parse_event_line(line);
      const Date d = day_of(ev->ts);
      if (d.weekday() == 2 && d <= ymd(2020, 2, 29)) {
        ++removed;
        continue;
      }
    }
    out << line << '\n';
  }
  out.close();

  auto cfg = paper_windows(scratch / "ac8.jsonl", scratch / "ac8_out");
  cfg.evaluation = {ymd(2020, 3, 1), ymd(2020, 3, 31), "evaluation"};
  cfg.region_level = RegionLevel::admin1;
  const auto art = run(cfg);
  const auto table = csv::read_table(scratch / "ac8_out" / "excluded_regions.csv");
  std::map<std::string, std::string> reasons;
  for (const auto& row : table.rows) reasons[row[table.column("region_id")]] = row[table.column("reason")];
  bool reported_vt = false, reported_ny = false;
  for (const auto& r : art.reports) {
    reported_vt |= r.region_id == "US-VT";
    reported_ny |= r.region_id == "US-NY";
  }
  const bool vt_excluded = reasons.contains("US-VT") && reasons["US-VT"] == "incomplete baseline";
  o.pass = vt_excluded && reasons.size() == 1 && !reported_vt && reported_ny && removed > 0 &&
           !fs::exists(scratch / "ac8_out" / "plots" / "US-VT.csv");
  o.detail = "removed " + std::to_string(removed) + " VT Wednesday events; US-VT reason \"" +
             (reasons.contains("US-VT") ? reasons["US-VT"] : std::string("<not excluded>")) + "\"; " +
             std::to_string(reasons.size()) + " excluded region(s); US-NY reported: " + (reported_ny ? "yes" : "no");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: mobidx_acceptance <mobidx-cli> [scratch-dir]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "mobidx_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 geodesy oracle", ac1_geodesy},
      {"AC2 pipeline vs oracle", [&] { return ac2_oracle(scratch); }},
      {"AC3 trivial scenarios", [&] { return ac3_trivial(scratch); }},
      {"AC4 halved mobility", [&] { return ac4_halved(scratch); }},
      {"AC5 MRI invariants", ac5_mri_invariants},
      {"AC6 smoothing suite", ac6_smoothing},
      {"AC7 thread determinism", [&] { return ac7_determinism(scratch, cli); }},
      {"AC8 exclusion semantics", [&] { return ac8_exclusion(scratch); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
