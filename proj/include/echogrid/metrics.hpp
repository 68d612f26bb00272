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
#include <span>
#include <string>
#include <vector>

namespace echogrid {

// Reward series for one environment stream.
struct RewardSeries {
  std::uint64_t env_seed = 0;
  std::vector<int> rewards;
  friend bool operator==(const RewardSeries&, const RewardSeries&) = default;
};

// What pairing needs to know about a run.
struct RunSummary {
  std::string strategy;
  std::uint64_t goal_seed = 0;
  int episodes = 0;
  std::vector<RewardSeries> envs;
};

// Element k is the mean of rewards[0..k]. Throws ConfigError on empty input.
std::vector<double> cumulative_average(std::span<const int> rewards);

// Per-env cumulative averages of `method` minus `baseline`, then the mean
// across envs at each episode index. Throws ConfigError unless both runs
// share env seeds (in order), episode counts and goal seed.
std::vector<double> gain_over_baseline(const RunSummary& method, const RunSummary& baseline);

// Mean across envs of the per-env cumulative averages.
std::vector<double> mean_cumulative_average(const RunSummary& run);

}  // namespace echogrid
