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

#include <stdexcept>
#include <string>

namespace mobidx {

enum class ErrorKind {
  invalid_input,    // a value violates a type invariant or precondition
  config,           // run or scenario configuration is inconsistent
  input,            // unreadable input, unwritable output
  undefined_mri,    // no usable data to form an MRI
  excluded_region,  // baseline table incomplete
  verification,     // pipeline and oracle tables disagree
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

struct UndefinedMri : Error {
  explicit UndefinedMri(const std::string& what) : Error(ErrorKind::undefined_mri, what) {}
};

struct ExcludedRegion : Error {
  explicit ExcludedRegion(const std::string& what) : Error(ErrorKind::excluded_region, what) {}
};

}  // namespace mobidx
