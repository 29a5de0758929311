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
#include <string>
#include <vector>

namespace mobidx {

struct Tolerances {
  double distance_rel = 1e-9;  // daily means and baselines, km
  double nmi_rel = 1e-9;       // raw and smoothed NMI
  double mri_abs = 1e-4;       // MRI and deltas
  double abs_floor = 1e-12;    // relative checks pass below this absolute gap
};

struct Mismatch {
  std::string table;
  std::string key;
  std::string column;
  std::string actual;
  std::string expected;
};

struct VerifyReport {
  std::size_t tables = 0;
  std::size_t rows = 0;
  std::vector<Mismatch> mismatches;

  bool ok() const noexcept { return mismatches.empty(); }
};

/// Compares the six CSV tables of two run directories row by row, keyed on
/// their identifying columns. Counts, labels and empty fields must match
/// exactly. excluded_regions.csv is compared on region and reason only.
VerifyReport verify_outputs(const std::filesystem::path& actual, const std::filesystem::path& expected,
                            const Tolerances& tol = {});

std::string render(const VerifyReport& report, std::size_t max_listed = 20);

}  // namespace mobidx
