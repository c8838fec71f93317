// Copyright 2026 The anyonsim Authors
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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace anyonsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIo = 4,
};

/// Settings of a `run` invocation. Loaded from --config JSON, then
/// overridden by command-line flags.
struct RunConfig {
  std::string category;
  std::string protocol;  // "forced" or "group-proj"
  std::string anyon;
  std::string setup;     // group-proj: state diagram
  int inside = 1;        // group-proj: inside prefix length
  std::int64_t trials = 1;
  std::optional<std::uint64_t> seed;
  int max_even_steps = 200;
  int jobs = 1;
  std::string csv_path;
  std::string log_path;
  std::string snapshot_path;
};

/// Parses a JSON config; unknown keys and wrong types are usage errors.
RunConfig parse_run_config(const std::string& json_text, const std::string& source);

/// Runs the command line; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anyonsim
