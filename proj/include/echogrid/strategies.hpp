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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "echogrid/episode.hpp"
#include "echogrid/lm.hpp"

namespace echogrid {

enum class UpdateOutcome { Inserted, Replaced, Kept, Rejected };
std::string_view to_string(UpdateOutcome o) noexcept;

struct WorkflowEntry {
  std::string goal;
  std::string workflow;
  friend bool operator==(const WorkflowEntry&, const WorkflowEntry&) = default;
};

// Goal-keyed workflow store. A goal's workflow only ever gets shorter.
class ReplayBuffer {
 public:
  // Inserts absent goals; replaces a stored workflow only when the new one
  // has strictly fewer characters; rejects empty workflows. The goal is
  // canonicalized before keying.
  UpdateOutcome update(std::string_view goal, std::string workflow);

  const std::string* find(std::string_view goal) const;
  const std::vector<WorkflowEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ReplayBuffer&, const ReplayBuffer&) = default;

 private:
  std::vector<WorkflowEntry> entries_;  // insertion order
};

inline UpdateOutcome update_rule(ReplayBuffer& buffer, std::string_view goal, std::string workflow) {
  return buffer.update(goal, std::move(workflow));
}

// AWM's episodic memory: every workflow is appended, duplicates included.
using WorkflowLog = std::vector<WorkflowEntry>;

// Reflexion's semantic memory. Append-only.
struct SemanticMemory {
  std::vector<std::string> reflections;
  friend bool operator==(const SemanticMemory&, const SemanticMemory&) = default;
};

struct OfflineOptions {
  LMParams params;  // temperature 0, 4000 new tokens by default
  std::size_t max_goals = 8;
  int horizon = kDefaultHorizon;
};

// What one after-episode pass did.
struct HindsightReport {
  int lm_calls = 0;
  std::vector<std::string> goals;  // canonical goals considered
  std::vector<UpdateOutcome> outcomes;
  std::vector<std::string> diagnostics;  // parse failures and skipped stages
};

// Hindsight rule (summarize, identify goals, infer one workflow per goal)
// followed by the keep-shorter update rule. Makes 2 + |goals| LM calls, or
// 1 when the summary cannot be parsed.
HindsightReport echo_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                   ReplayBuffer& buffer, const OfflineOptions& options = {});

HindsightReport reflexion_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                        SemanticMemory& memory, const OfflineOptions& options = {});

HindsightReport awm_after_episode(LMBackend& backend, const Trajectory& trajectory, WorkflowLog& log,
                                  const OfflineOptions& options = {});

// AWM's hindsight rule with the keep-shorter update rule.
HindsightReport awmpp_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                    ReplayBuffer& buffer, const OfflineOptions& options = {});

// Numbered summary entries in key order, or a parse error.
Parsed<std::vector<std::string>> parse_summary(std::string_view text);

std::string render_workflows(const std::vector<WorkflowEntry>& entries);
std::string render_notes(const SemanticMemory& memory);

enum class StrategyKind { React, Reflexion, Awm, AwmPlusPlus, Echo };
std::string_view to_string(StrategyKind k) noexcept;
std::optional<StrategyKind> strategy_from_string(std::string_view s) noexcept;

// One (hindsight rule, update rule) pair plus the memory it owns. The only
// channel through which one episode can influence the next.
class MemoryStrategy {
 public:
  virtual ~MemoryStrategy() = default;
  virtual StrategyKind kind() const noexcept = 0;
  virtual HindsightReport after_episode(LMBackend& backend, const Trajectory& trajectory) = 0;
  // Text appended to the agent's system prompt; empty when nothing is known.
  virtual std::string render_memory() const = 0;
  virtual nlohmann::json snapshot() const = 0;
  // (goal, workflow) pairs, for the validity analysis.
  virtual std::vector<WorkflowEntry> workflows() const { return {}; }
};

std::unique_ptr<MemoryStrategy> make_strategy(StrategyKind kind, OfflineOptions options = {});

// Workflow pairs stored in a memory snapshot (empty for Reflexion/ReAct).
std::vector<WorkflowEntry> workflows_from_snapshot(const nlohmann::json& snapshot);

}  // namespace echogrid
