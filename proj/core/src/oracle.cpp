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

#include "mobidx/oracle.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobidx/error.hpp"

namespace mobidx::oracle {

namespace {

using nlohmann::json;
using Real = long double;

constexpr Real kPi = 3.141592653589793238462643383279502884L;
constexpr Real kRadius = 6371.0088L;
constexpr Real kStep = 1e-3L;
const std::string kGlobal = "GLOBAL";

// ---- calendar ---------------------------------------------------------------

std::string ymd_text(long days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

int weekday_of(long days) {
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

const char* kWeekdays[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

long to_days(Date d) { return d.days_since_epoch(); }

std::optional<long long> parse_instant(std::string s) {
  if (s.size() > 10 && (s[10] == 't' || s[10] == ' ')) s[10] = 'T';
  int y, mo, d, h, mi, se;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se, &consumed) != 6) {
    return std::nullopt;
  }
  if (consumed != 19) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 59) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const auto digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == digits) return std::nullopt;
  }
  long long offset = 0;
  const std::string rest = s.substr(pos);
  if (rest == "Z" || rest == "z") {
    offset = 0;
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':' &&
             std::isdigit(static_cast<unsigned char>(rest[1])) && std::isdigit(static_cast<unsigned char>(rest[2])) &&
             std::isdigit(static_cast<unsigned char>(rest[4])) && std::isdigit(static_cast<unsigned char>(rest[5]))) {
    const int oh = std::stoi(rest.substr(1, 2));
    const int om = std::stoi(rest.substr(4, 2));
    if (oh > 23 || om > 59) return std::nullopt;
    offset = (rest[0] == '-' ? -1 : 1) * (oh * 3600LL + om * 60LL);
  } else {
    return std::nullopt;
  }
  const long long days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400LL + h * 3600LL + mi * 60LL + se - offset;
}

// ---- events -----------------------------------------------------------------

struct Event {
  std::string user;
  long long ts;
  Real lat, lon;
  std::string country, admin1;
  std::string source;
  int precision_rank;
  std::size_t order;
};

int precision_rank(const std::string& p) {
  if (p == "country") return 0;
  if (p == "admin") return 1;
  if (p == "city") return 2;
  if (p == "gps") return 3;
  return -1;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

std::optional<Event> read_event(const std::string& line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  for (const char* k : {"user_id", "ts", "country", "source", "precision"}) {
    if (!j.contains(k) || !j[k].is_string()) return std::nullopt;
  }
  for (const char* k : {"lat", "lon"}) {
    if (!j.contains(k) || !j[k].is_number()) return std::nullopt;
  }
  Event e;
  e.user = j["user_id"].get<std::string>();
  if (e.user.empty()) return std::nullopt;
  const auto ts = parse_instant(j["ts"].get<std::string>());
  if (!ts) return std::nullopt;
  e.ts = *ts;
  const double lat = j["lat"].get<double>();
  const double lon = j["lon"].get<double>();
  if (!(lat >= -90 && lat <= 90 && lon >= -180 && lon <= 180)) return std::nullopt;
  e.lat = lat;
  e.lon = lon;
  e.country = j["country"].get<std::string>();
  e.source = j["source"].get<std::string>();
  e.precision_rank = precision_rank(j["precision"].get<std::string>());
  if (e.precision_rank < 0) return std::nullopt;
  if (j.contains("admin1") && !j["admin1"].is_null()) {
    if (!j["admin1"].is_string()) return std::nullopt;
    e.admin1 = j["admin1"].get<std::string>();
  }
  return e;
}

// ---- geometry ---------------------------------------------------------------

Real haversine(Real lat1, Real lon1, Real lat2, Real lon2) {
  const Real r = kPi / 180;
  const Real a = std::sin((lat2 - lat1) * r / 2);
  const Real b = std::sin((lon2 - lon1) * r / 2);
  Real h = a * a + std::cos(lat1 * r) * std::cos(lat2 * r) * b * b;
  if (h > 1) h = 1;
  return 2 * kRadius * std::asin(std::sqrt(h));
}

// ---- regions ----------------------------------------------------------------

struct Box {
  std::string name;
  Real min_lat, min_lon, max_lat, max_lon;
};

struct RegionRule {
  RegionLevel level;
  std::vector<Box> boxes;

  std::optional<std::string> operator()(Real lat, Real lon, const Event& tagged) const {
    if (level == RegionLevel::global) return std::nullopt;
    if (!boxes.empty()) {
      for (const auto& b : boxes) {
        if (lat >= b.min_lat && lat <= b.max_lat && lon >= b.min_lon && lon <= b.max_lon) return b.name;
      }
      return std::nullopt;
    }
    if (level == RegionLevel::country) {
      if (tagged.country.empty()) return std::nullopt;
      return tagged.country;
    }
    if (tagged.admin1.empty()) return std::nullopt;
    if (tagged.country.empty()) return tagged.admin1;
    const std::string prefix = tagged.country + "-";
    if (tagged.admin1.compare(0, prefix.size(), prefix) == 0) return tagged.admin1;
    return prefix + tagged.admin1;
  }
};

std::vector<Box> load_boxes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open region boxes '" + path + "'");
  std::vector<Box> boxes;
  std::string line;
  while (std::getline(in, line)) {
    line = strip(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    char name[256];
    double a, b, c, d;
    if (std::sscanf(line.c_str(), "%255[^,],%lf,%lf,%lf,%lf", name, &a, &b, &c, &d) != 5) {
      throw ConfigError("bad region box line");
    }
    boxes.push_back({name, a, b, c, d});
  }
  return boxes;
}

// ---- smoothing & areas ------------------------------------------------------

struct Run {
  long first;
  std::vector<Real> values;
};

std::vector<Real> smooth(const std::vector<Real>& x, Real sigma) {
  const long radius = static_cast<long>(std::ceil(4 * static_cast<double>(sigma)));
  std::vector<Real> w;
  Real total = 0;
  for (long k = -radius; k <= radius; ++k) {
    w.push_back(std::exp(-(Real)k * k / (2 * sigma * sigma)));
    total += w.back();
  }
  for (auto& v : w) v /= total;
  const long n = static_cast<long>(x.size());
  // Explicit padded copy, mirrored with the edge sample repeated.
  std::vector<Real> padded;
  for (long i = -radius; i < n + radius; ++i) {
    long j = i;
    while (j < 0 || j >= n) {
      if (j < 0) j = -j - 1;
      if (j >= n) j = 2 * n - 1 - j;
    }
    padded.push_back(x[static_cast<std::size_t>(j)]);
  }
  std::vector<Real> y(x.size(), 0);
  for (long i = 0; i < n; ++i) {
    Real acc = 0;
    for (long k = 0; k < 2 * radius + 1; ++k) acc += w[static_cast<std::size_t>(k)] * padded[static_cast<std::size_t>(i + k)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<Run> smooth_series(const std::map<long, Real>& samples, Real sigma, int bridge) {
  std::vector<Run> runs;
  long prev = 0;
  Real prev_v = 0;
  bool any = false;
  for (const auto& [day, v] : samples) {
    if (!any || day - prev - 1 > bridge) {
      runs.push_back({day, {v}});
    } else {
      const long gap = day - prev - 1;
      for (long g = 1; g <= gap; ++g) runs.back().values.push_back(prev_v + (v - prev_v) * g / (gap + 1));
      runs.back().values.push_back(v);
    }
    prev = day;
    prev_v = v;
    any = true;
  }
  for (auto& r : runs) r.values = smooth(r.values, sigma);
  return runs;
}

struct Areas {
  Real below = 0, above = 0, perfect = 0;
  bool usable = false;
};

Areas integrate(const std::vector<Run>& runs, long from, long to) {
  Areas a;
  for (const auto& r : runs) {
    const long last = r.first + static_cast<long>(r.values.size()) - 1;
    const long lo = std::max(from, r.first);
    const long hi = std::min(to, last);
    if (hi - lo < 1) continue;
    a.usable = true;
    const long steps = std::lround(static_cast<double>((hi - lo) / kStep));
    for (long s = 0; s < steps; ++s) {
      const Real t = lo + (s + 0.5L) * kStep;  // absolute day position
      const long i = static_cast<long>(std::floor(t)) - r.first;
      const Real frac = t - std::floor(t);
      const Real v = r.values[static_cast<std::size_t>(i)] * (1 - frac) + r.values[static_cast<std::size_t>(i + 1)] * frac;
      const Real f = 1 - v;
      if (f > 0) {
        a.below += f * kStep;
      } else {
        a.above -= f * kStep;
      }
    }
    a.perfect += hi - lo;
  }
  return a;
}

// ---- output -----------------------------------------------------------------

std::string num(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write " + p.string());
}

bool region_order(const std::string& a, const std::string& b) {
  if ((a == kGlobal) != (b == kGlobal)) return a == kGlobal;
  return a < b;
}

struct Cell {
  Real sd_sum = 0, cd_sum = 0;
  long long sd_n = 0, cd_n = 0;
};

}  // namespace

void run(const RunConfig& config, const std::filesystem::path& dir, std::size_t max_events) {
  config.validate();

  // Read everything.
  std::vector<Event> events;
  std::size_t records = 0;
  std::set<std::string> deny;
  if (!config.bot_denylist.empty()) {
    std::ifstream in(config.bot_denylist);
    if (!in) throw InputError("cannot open bot denylist '" + config.bot_denylist + "'");
    std::string line;
    while (std::getline(in, line)) {
      line = strip(line);
      if (!line.empty() && line[0] != '#') deny.insert(lower(line));
    }
  }
  const RegionRule rule{config.region_level,
                        config.membership == Membership::bbox ? load_boxes(config.region_boxes) : std::vector<Box>{}};
  for (const auto& path : config.inputs) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = strip(line);
      if (t.empty() || t[0] == '#') continue;
      auto e = read_event(line);
      if (!e) continue;
      if (++records > max_events) {
        throw InputError("corpus exceeds the oracle limit of " + std::to_string(max_events) + " events");
      }
      if (e->precision_rank < static_cast<int>(config.min_precision)) continue;
      if (deny.count(lower(e->source))) continue;
      e->order = events.size();
      events.push_back(std::move(*e));
    }
  }

  // Regions appearing among kept events.
  std::set<std::string> seen;
  for (const auto& e : events) {
    seen.insert(kGlobal);
    if (auto r = rule(e.lat, e.lon, e)) seen.insert(*r);
  }

  // Tracks keyed by user, then day.
  std::map<std::string, std::map<long, std::vector<const Event*>>> tracks;
  for (const auto& e : events) {
    const long long shifted = e.ts + config.day_offset_hours * 3600LL;
    long day = static_cast<long>(shifted / 86400);
    if (shifted % 86400 != 0 && shifted < 0) --day;
    tracks[e.user][day].push_back(&e);
  }

  std::map<std::pair<std::string, long>, Cell> cells;
  for (auto& [user, days] : tracks) {
    struct Center {
      Real lat, lon;
      const Event* tag;
    };
    std::map<long, Center> centers;
    for (auto& [day, pts] : days) {
      std::stable_sort(pts.begin(), pts.end(), [](const Event* a, const Event* b) {
        return a->ts < b->ts || (a->ts == b->ts && a->order < b->order);
      });
      if (pts.size() >= 2) {
        Real best = 0;
        for (std::size_t m = 1; m < pts.size(); ++m) {
          best = std::max(best, haversine(pts[0]->lat, pts[0]->lon, pts[m]->lat, pts[m]->lon));
        }
        const Event& first = *pts[0];
        auto& g = cells[{kGlobal, day}];
        g.sd_sum += best;
        ++g.sd_n;
        if (auto r = rule(first.lat, first.lon, first)) {
          auto& c = cells[{*r, day}];
          c.sd_sum += best;
          ++c.sd_n;
        }
      }
      Real lat = 0, lon = 0;
      for (const auto* p : pts) {
        lat += p->lat;
        lon += p->lon;
      }
      lat /= pts.size();
      lon /= pts.size();
      const Real mid = (static_cast<Real>(pts.front()->ts) + static_cast<Real>(pts.back()->ts)) / 2;
      const Event* tag = pts.front();
      for (const auto* p : pts) {
        if (std::fabs(p->ts - mid) < std::fabs(tag->ts - mid)) tag = p;
      }
      centers[day] = {lat, lon, tag};
    }
    for (const auto& [day, c] : centers) {
      const auto next = centers.find(day + 1);
      if (next == centers.end()) continue;
      const Real d = haversine(c.lat, c.lon, next->second.lat, next->second.lon);
      auto& g = cells[{kGlobal, day}];
      g.cd_sum += d;
      ++g.cd_n;
      if (auto r = rule(c.lat, c.lon, *c.tag)) {
        auto& cell = cells[{*r, day}];
        cell.cd_sum += d;
        ++cell.cd_n;
      }
    }
  }

  std::filesystem::create_directories(dir);

  // Daily table, region-major.
  std::map<std::string, std::map<long, Cell>, bool (*)(const std::string&, const std::string&)> daily(region_order);
  for (const auto& [key, c] : cells) daily[key.first][key.second] = c;
  {
    std::string t = "region_id,date,mean_d_sd_km,n_sd,mean_d_cd_km,n_cd\n";
    for (const auto& [region, days] : daily) {
      for (const auto& [day, c] : days) {
        t += quote(region) + "," + ymd_text(day) + "," + (c.sd_n ? num(c.sd_sum / c.sd_n) : "") + "," +
             std::to_string(c.sd_n) + "," + (c.cd_n ? num(c.cd_sum / c.cd_n) : "") + "," + std::to_string(c.cd_n) +
             "\n";
      }
    }
    write(dir / "daily_metrics.csv", t);
  }

  std::vector<std::string> regions(seen.begin(), seen.end());
  for (const auto& [r, d] : daily) {
    if (!seen.count(r)) regions.push_back(r);
  }
  std::sort(regions.begin(), regions.end(), region_order);

  const long b_first = to_days(config.baseline.first), b_last = to_days(config.baseline.last);
  const long e_first = to_days(config.evaluation.first), e_last = to_days(config.evaluation.last);

  // Report windows.
  struct Window {
    std::string label;
    long first, last;
  };
  std::vector<Window> windows;
  if (config.window_scheme == WindowScheme::custom) {
    for (const auto& w : config.windows) windows.push_back({w.label, to_days(w.first), to_days(w.last)});
  } else {
    long d = e_first;
    while (d <= e_last) {
      using namespace std::chrono;
      const year_month_day ymd{sys_days{std::chrono::days{d}}};
      const auto next = sys_days{(ymd.year() / ymd.month() / 1) + months{1}}.time_since_epoch().count();
      char label[16];
      std::snprintf(label, sizeof label, "%04d-%02u", int(ymd.year()), unsigned(ymd.month()));
      windows.push_back({label, d, std::min<long>(next - 1, e_last)});
      d = next;
    }
  }

  std::string baselines = "region_id,metric,weekday,baseline_km,support\n";
  std::string nmi = "region_id,metric,date,raw_nmi,n_users\n";
  std::string smoothed = "region_id,metric,date,smoothed_nmi\n";
  std::string report =
      "region_id,window_label,mri_sd,mri_cd,u_sd,u_cd,mri_integrated,delta_prev_sd,delta_prev_cd,"
      "delta_prev_integrated\n";
  std::string excluded = "region_id,reason,detail\n";

  for (const auto& region : regions) {
    const auto it = daily.find(region);
    if (it == daily.end()) {
      excluded += quote(region) + ",no eligible users,\n";
      continue;
    }
    const auto& days = it->second;
    bool complete = true;
    std::map<long, Real> series[2];
    for (int metric = 0; metric < 2; ++metric) {
      Real sum[7] = {};
      int support[7] = {};
      for (const auto& [day, c] : days) {
        if (day < b_first || day > b_last) continue;
        const long long n = metric == 0 ? c.sd_n : c.cd_n;
        if (n == 0 || n < config.min_users_per_day) continue;
        sum[weekday_of(day)] += (metric == 0 ? c.sd_sum : c.cd_sum) / n;
        ++support[weekday_of(day)];
      }
      Real base[7];
      bool has[7];
      for (int w = 0; w < 7; ++w) {
        has[w] = support[w] >= config.min_days_per_weekday && sum[w] / support[w] > 0;
        base[w] = has[w] ? sum[w] / support[w] : 0;
        complete = complete && has[w];
        baselines += quote(region) + "," + (metric == 0 ? "sd" : "cd") + "," + kWeekdays[w] + "," +
                     (has[w] ? num(base[w]) : "") + "," + std::to_string(support[w]) + "\n";
      }
      for (const auto& [day, c] : days) {
        if (day < e_first || day > e_last) continue;
        const long long n = metric == 0 ? c.sd_n : c.cd_n;
        if (n == 0 || !has[weekday_of(day)]) continue;
        series[metric][day] = ((metric == 0 ? c.sd_sum : c.cd_sum) / n) / base[weekday_of(day)];
      }
    }
    if (!complete) {
      excluded += quote(region) + ",incomplete baseline,\n";
      continue;
    }
    std::vector<Run> runs[2];
    for (int metric = 0; metric < 2; ++metric) {
      const char* m = metric == 0 ? "sd" : "cd";
      for (const auto& [day, v] : series[metric]) {
        const auto& c = days.at(day);
        nmi += quote(region) + "," + m + "," + ymd_text(day) + "," + num(v) + "," +
               std::to_string(metric == 0 ? c.sd_n : c.cd_n) + "\n";
      }
      runs[metric] = smooth_series(series[metric], static_cast<Real>(config.sigma), config.bridge_limit);
      for (const auto& r : runs[metric]) {
        for (std::size_t k = 0; k < r.values.size(); ++k) {
          smoothed += quote(region) + "," + m + "," + ymd_text(r.first + static_cast<long>(k)) + "," +
                      num(r.values[k]) + "\n";
        }
      }
    }
    std::optional<std::array<Real, 3>> prev;
    int rows = 0;
    for (const auto& w : windows) {
      long long u_sd = 0, u_cd = 0;
      for (const auto& [day, c] : days) {
        if (day >= w.first && day <= w.last) {
          u_sd += c.sd_n;
          u_cd += c.cd_n;
        }
      }
      const Areas a_sd = integrate(runs[0], w.first, w.last);
      const Areas a_cd = integrate(runs[1], w.first, w.last);
      if (!a_sd.usable || !a_cd.usable || u_sd + u_cd == 0) {
        prev.reset();
        continue;
      }
      const Real m_sd = (a_sd.below - a_sd.above) / a_sd.perfect;
      const Real m_cd = (a_cd.below - a_cd.above) / a_cd.perfect;
      const Real m = (m_sd * u_sd + m_cd * u_cd) / (u_sd + u_cd);
      report += quote(region) + "," + quote(w.label) + "," + num(m_sd) + "," + num(m_cd) + "," +
                std::to_string(u_sd) + "," + std::to_string(u_cd) + "," + num(m) + "," +
                (prev ? num(m_sd - (*prev)[0]) : "") + "," + (prev ? num(m_cd - (*prev)[1]) : "") + "," +
                (prev ? num(m - (*prev)[2]) : "") + "\n";
      prev = std::array<Real, 3>{m_sd, m_cd, m};
      ++rows;
    }
    if (rows == 0) excluded += quote(region) + ",no evaluation coverage,\n";
  }

  write(dir / "baselines.csv", baselines);
  write(dir / "nmi_series.csv", nmi);
  write(dir / "nmi_smoothed.csv", smoothed);
  write(dir / "mri_report.csv", report);
  write(dir / "excluded_regions.csv", excluded);
}

}  // namespace mobidx::oracle
