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

#include "echogrid/metrics.hpp"

#include "echogrid/errors.hpp"

namespace echogrid {

std::vector<double> cumulative_average(std::span<const int> rewards) {
  if (rewards.empty()) throw ConfigError("cumulative_average: empty reward series");
  std::vector<double> out;
  out.reserve(rewards.size());
  long long sum = 0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    sum += rewards[k];
    out.push_back(static_cast<double>(sum) / static_cast<double>(k + 1));
  }
  return out;
}

namespace {

void check_shape(const RunSummary& run, const char* which) {
  if (run.envs.empty()) throw ConfigError(std::string(which) + " run has no env streams");
  for (const auto& env : run.envs) {
    if (static_cast<int>(env.rewards.size()) != run.episodes) {
      throw ConfigError(std::string(which) + " run: env " + std::to_string(env.env_seed) + " has " +
                        std::to_string(env.rewards.size()) + " episodes, expected " + std::to_string(run.episodes));
    }
  }
}

}  // namespace

std::vector<double> mean_cumulative_average(const RunSummary& run) {
  check_shape(run, "the");
  std::vector<double> mean(static_cast<std::size_t>(run.episodes), 0.0);
  for (const auto& env : run.envs) {
    const auto avg = cumulative_average(env.rewards);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += avg[k];
  }
  for (auto& v : mean) v /= static_cast<double>(run.envs.size());
  return mean;
}

std::vector<double> gain_over_baseline(const RunSummary& method, const RunSummary& baseline) {
  check_shape(method, "method");
  check_shape(baseline, "baseline");
  if (method.episodes != baseline.episodes) throw ConfigError("runs differ in episodes per env");
  if (method.goal_seed != baseline.goal_seed) throw ConfigError("runs differ in goal-sampling seed");
  if (method.envs.size() != baseline.envs.size()) throw ConfigError("runs differ in env count");
  std::vector<double> gain(static_cast<std::size_t>(method.episodes), 0.0);
  for (std::size_t e = 0; e < method.envs.size(); ++e) {
    if (method.envs[e].env_seed != baseline.envs[e].env_seed) throw ConfigError("runs differ in env seeds");
    const auto m = cumulative_average(method.envs[e].rewards);
    const auto b = cumulative_average(baseline.envs[e].rewards);
    for (std::size_t k = 0; k < gain.size(); ++k) gain[k] += m[k] - b[k];
  }
  for (auto& v : gain) v /= static_cast<double>(method.envs.size());
  return gain;
}

}  // namespace echogrid
