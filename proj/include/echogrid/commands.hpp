// Copyright 2026 The echogrid Authors
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
#include <optional>
#include <string>
#include <vector>

#include "echogrid/episode.hpp"
#include "echogrid/harness.hpp"

// Command implementations shared by the C API and the CLI. Each returns the
// human-readable report; files are written as a side effect.
namespace echogrid::commands {

struct GenOptions {
  std::vector<std::uint64_t> seeds;
  std::string out;
  bool force = false;
  bool verbose = false;  // append an ASCII map per world to the report
  GenConfig config;
};
std::string gen(const GenOptions& options);

struct RunOptions {
  RunConfig config;
  std::string envs;           // world snapshot dir; overrides config seeds
  std::string out;            // defaults to the resume config's directory
  std::string resume_config;  // path to a previous config.json
  bool force = false;
};
std::string run(const RunOptions& options);

struct EvalOptions {
  std::vector<std::string> runs;
  std::string baseline;
  std::string out;   // merged CSV
  std::string plot;  // SVG, optional
};
std::string eval(const EvalOptions& options);

struct ValidateOptions {
  std::string run;
  int samples = 40;
  std::string backend;  // defaults to the run's backend
  std::uint64_t seed = 0;
};
std::string validate(const ValidateOptions& options);

// Pretty-prints one trajectory; `step` selects a single step.
std::string format_replay(const Trajectory& t, std::optional<int> step = std::nullopt);

std::string world_file_name(std::uint64_t seed);

}  // namespace echogrid::commands
