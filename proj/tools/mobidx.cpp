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

// mobidx: mobility responsiveness pipeline.
//
//   mobidx run     --input events.jsonl --out DIR [--config run.conf] [flags]
//   mobidx synth   --scenario scenario.json --out events.jsonl
//   mobidx oracle  --input events.jsonl --out DIR [flags]
//   mobidx verify  --actual DIR --expected DIR
//   mobidx verify  --input events.jsonl --out DIR [flags]   (runs both, then diffs)

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mobidx/config.hpp"
#include "mobidx/error.hpp"
#include "mobidx/oracle.hpp"
#include "mobidx/pipeline.hpp"
#include "mobidx/synth.hpp"
#include "mobidx/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitMismatch = 4;

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mobidx::InputError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// RunConfig flags shared by run, oracle and verify.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> values;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_file, "key = value config file; flags override it");
    cmd.add_option("--input,-i", inputs, "event file (JSON lines); repeatable or comma-separated");
    for (const auto& key : mobidx::config_keys()) {
      if (key == "input") continue;
      cmd.add_option(flag_name(key), values[key], key);
    }
  }

  mobidx::RunConfig build(const CLI::App& cmd) const {
    mobidx::RunConfig config;
    if (!config_file.empty()) mobidx::apply_config_text(config, read_text(config_file, "config file"));
    if (!inputs.empty()) {
      std::string joined;
      for (const auto& p : inputs) joined += (joined.empty() ? "" : ",") + p;
      mobidx::apply_setting(config, "input", joined);
    }
    for (const auto& key : mobidx::config_keys()) {
      if (key == "input") continue;
      if (cmd.count(flag_name(key)) > 0) mobidx::apply_setting(config, key, values.at(key));
    }
    return config;
  }
};

int exit_code(mobidx::ErrorKind kind) {
  switch (kind) {
    case mobidx::ErrorKind::config: return kExitConfig;
    case mobidx::ErrorKind::input: return kExitInput;
    case mobidx::ErrorKind::verification: return kExitMismatch;
    default: return kExitFailure;
  }
}

int do_run(const mobidx::RunConfig& config) {
  const auto art = mobidx::run(config);
  std::cerr << "wrote " << config.out << ": " << art.regions.size() << " regions, " << art.reports.size()
            << " report rows, " << art.exclusions.size() << " excluded\n";
  return kExitOk;
}

int do_synth(const std::string& scenario_path, const std::string& out_path) {
  const auto scenario = mobidx::synth::parse_scenario(read_text(scenario_path, "scenario"));
  if (out_path.empty() || out_path == "-") {
    mobidx::synth::generate(scenario, std::cout);
    std::cout.flush();
    if (!std::cout) throw mobidx::InputError("failed writing to stdout");
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mobidx::InputError("cannot write '" + out_path + "'");
  mobidx::synth::generate(scenario, out);
  out.close();
  if (!out) throw mobidx::InputError("failed writing '" + out_path + "'");
  return kExitOk;
}

int report_verify(const std::filesystem::path& actual, const std::filesystem::path& expected,
                  const mobidx::Tolerances& tol) {
  const auto report = mobidx::verify_outputs(actual, expected, tol);
  std::cout << mobidx::render(report);
  return report.ok() ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobility responsiveness index pipeline"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run the full pipeline");
  ConfigFlags run_flags;
  run_flags.attach(*run_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic event corpus");
  std::string scenario_path, synth_out;
  synth_cmd->add_option("--scenario,-s", scenario_path, "scenario JSON")->required();
  synth_cmd->add_option("--out,-o", synth_out, "output event file ('-' for stdout)");

  auto* oracle_cmd = app.add_subcommand("oracle", "recompute the tables with the brute-force oracle");
  ConfigFlags oracle_flags;
  oracle_flags.attach(*oracle_cmd);
  std::size_t max_events = mobidx::oracle::kDefaultMaxEvents;
  oracle_cmd->add_option("--max-events", max_events, "refuse corpora with more records");

  auto* verify_cmd = app.add_subcommand("verify", "compare pipeline tables against oracle tables");
  ConfigFlags verify_flags;
  verify_flags.attach(*verify_cmd);
  std::string actual_dir, expected_dir;
  mobidx::Tolerances tol;
  verify_cmd->add_option("--actual", actual_dir, "pipeline output directory");
  verify_cmd->add_option("--expected", expected_dir, "oracle output directory");
  verify_cmd->add_option("--distance-rel", tol.distance_rel, "relative tolerance for distances")->capture_default_str();
  verify_cmd->add_option("--nmi-rel", tol.nmi_rel, "relative tolerance for NMI")->capture_default_str();
  verify_cmd->add_option("--mri-abs", tol.mri_abs, "absolute tolerance for MRI")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return do_run(run_flags.build(*run_cmd));
    if (*synth_cmd) return do_synth(scenario_path, synth_out);
    if (*oracle_cmd) {
      const auto config = oracle_flags.build(*oracle_cmd);
      mobidx::oracle::run(config, config.out, max_events);
      return kExitOk;
    }
    if (*verify_cmd) {
      if (!actual_dir.empty() || !expected_dir.empty()) {
        if (actual_dir.empty() || expected_dir.empty()) {
          throw mobidx::ConfigError("verify needs both --actual and --expected");
        }
        return report_verify(actual_dir, expected_dir, tol);
      }
      auto config = verify_flags.build(*verify_cmd);
      const std::filesystem::path root = config.out;
      config.validate();
      mobidx::oracle::run(config, root / "oracle", max_events);
      config.out = (root / "pipeline").string();
      mobidx::run(config);
      return report_verify(root / "pipeline", root / "oracle", tol);
    }
  } catch (const mobidx::Error& e) {
    std::cerr << "mobidx: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mobidx: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
