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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <map>
#include <fstream>
#include <random>
#include <sstream>

#include "mobidx/geodesy.hpp"
#include "mobidx/ingest.hpp"
#include "mobidx/pipeline.hpp"
#include "mobidx/responsiveness.hpp"
#include "mobidx/stream.hpp"
#include "mobidx/synth.hpp"

using namespace mobidx;

namespace {

synth::ScenarioConfig corpus_scenario(std::int64_t users) {
  synth::ScenarioConfig c;
  c.seed = 11;
  c.n_users = users;
  c.dates = {Date::from_ymd(2020, 1, 13), Date::from_ymd(2020, 3, 31), {}};
  c.regions = {{"US", "NY", 40, 41, -75, -73, 1.0}, {"US", "VT", 43, 44, -73, -72, 1.0}, {"FR", std::nullopt, 48, 49, 2, 3, 1.0}};
  c.posts_min = 1;
  c.posts_max = 4;
  c.post_probability = 0.6;
  c.radius_schedule = {{{Date::from_ymd(2020, 3, 1), Date::from_ymd(2020, 3, 31), {}}, 5.0}};
  return c;
}

const std::string& corpus_text(std::int64_t users) {
  static std::map<std::int64_t, std::string> cache;
  auto& text = cache[users];
  if (text.empty()) {
    std::ostringstream s;
    synth::generate(corpus_scenario(users), s);
    text = s.str();
  }
  return text;
}

}  // namespace

static void BM_GreatCircle(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  std::vector<GeoPoint> pts(1024);
  for (auto& p : pts) p = {lat(rng), lon(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(great_circle_distance(pts[i & 1023], pts[(i + 1) & 1023]));
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_GreatCircle);

static void BM_Smooth(benchmark::State& state) {
  NmiSeries s{"R", Metric::sd, {}};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> v(0, 2);
  for (int d = 0; d < state.range(0); ++d) s.samples.push_back({Date::from_ymd(2020, 3, 1) + d, v(rng), 10});
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_smooth(s));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Smooth)->Arg(92)->Arg(366)->Arg(3650);

static void BM_ParseLine(benchmark::State& state) {
  const std::string line =
      R"({"user_id":"u000123","ts":"2020-03-13T12:30:15Z","lat":40.7127753,"lon":-74.0059728,"country":"US","admin1":"NY","source":"Twitter for iPhone","precision":"gps"})";
  for (auto _ : state) benchmark::DoNotOptimize(parse_event_line(line));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_ParseLine);

static void BM_StreamIngest(benchmark::State& state) {
  const auto& text = corpus_text(2000);
  for (auto _ : state) {
    RegionAssigner regions(RegionLevel::admin1);
    StreamOptions opt;
    opt.threads = static_cast<unsigned>(state.range(0));
    StreamingAggregator agg(opt, regions);
    std::istringstream in(text);
    agg.consume(in);
    benchmark::DoNotOptimize(agg.finish());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_StreamIngest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Pipeline(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "mobidx_bench";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "events.jsonl", std::ios::binary);
    out << corpus_text(2000);
  }
  RunConfig cfg;
  cfg.inputs = {(dir / "events.jsonl").string()};
  cfg.evaluation = {Date::from_ymd(2020, 3, 1), Date::from_ymd(2020, 3, 31), "evaluation"};
  cfg.region_level = RegionLevel::admin1;
  cfg.out = (dir / "out").string();
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(cfg));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
