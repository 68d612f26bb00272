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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "echogrid/episode.hpp"
#include "echogrid/harness.hpp"
#include "echogrid/strategies.hpp"
#include "echogrid/world.hpp"

namespace echogrid {

enum class FailureKind { AgentDeviation, Infeasible };
std::string_view to_string(FailureKind k) noexcept;

struct ValiditySample {
  std::size_t env = 0;  // index into the pool
  std::uint64_t env_seed = 0;
  WorkflowEntry entry;
};

struct ValidityCase {
  ValiditySample sample;
  bool success = false;
  std::optional<FailureKind> failure;
  std::string detail;
  Trajectory trajectory;
};

struct ValidityResult {
  bool nothing_to_validate = false;
  int successes = 0;
  int total = 0;
  std::vector<ValidityCase> cases;

  std::string headline() const;  // "34/40 (85%)" or "nothing to validate"
};

struct ValidityPool {
  GridWorld world;
  std::vector<WorkflowEntry> workflows;
};

using FailureClassifier =
    std::function<FailureKind(const GridWorld& world, const ValiditySample& sample, const Trajectory& trajectory)>;

// Infeasible when the goal is unknown or absent, the workflow does not parse,
// or executing it literally from the start state misses the goal; otherwise
// the agent deviated.
FailureKind classify_failure(const GridWorld& world, const ValiditySample& sample, const Trajectory& trajectory);

// Samples `n_samples` pairs (cycling a shuffled pool when it is smaller),
// injects each workflow alone into a fresh agent's prompt and runs one
// episode from the world's start state.
ValidityResult validity_analysis(const std::vector<ValidityPool>& pools, const BackendFactory& factory,
                                 int n_samples, std::uint64_t seed, int horizon = kDefaultHorizon,
                                 const FailureClassifier& classify = classify_failure);

}  // namespace echogrid
