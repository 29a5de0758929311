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
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mobidx::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Writes one record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InputError if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a file written by write_row (RFC 4180 quoting, no embedded newlines).
Table read_table(const std::filesystem::path& path);

/// Writes `content` to `path`, throwing InputError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mobidx::csv
