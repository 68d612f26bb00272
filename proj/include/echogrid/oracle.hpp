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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echogrid/episode.hpp"
#include "echogrid/lm.hpp"
#include "echogrid/world.hpp"

namespace echogrid {

struct Plan {
  bool feasible = false;
  std::vector<Action> actions;  // ends with the pick-up when feasible
};

// Shortest action sequence from the world's current state to picking up the
// goal object. Searches (position, facing, door states, carrying); objects
// other than the goal are obstacles and are never picked up. Throws
// ConfigError when the goal object does not exist.
Plan bfs_plan(const GridWorld& world, const Goal& goal);

// Follows bfs_plan, emitting its choices as {"thought", "choice"} text
// that is run back through parse_choice.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(const GridWorld& world) : world_(world) {}
  void begin_episode(const Goal& goal, int horizon) override;
  Decision decide(const PolicyContext& ctx) override;

 private:
  const GridWorld& world_;
  std::vector<Action> plan_;
  std::size_t next_ = 0;
  std::size_t consumed_ = 0;
};

// "Step 1: turn right. Step 2: go forward 3 times. Step 3: toggle the red
// door. ... Step N: pick up the grey star." Runs of identical moves are
// merged. `world` must be the state the plan starts from.
std::string format_workflow(const GridWorld& world, std::span<const Action> plan);

// Inverse of format_workflow; nullopt when any step is not a primitive
// phrase this format produces.
std::optional<std::vector<Action>> parse_workflow_actions(std::string_view workflow);

// Colored entities a workflow mentions, e.g. {"red door", "grey star"}.
std::vector<std::string> workflow_references(std::string_view workflow);

// Deterministic LM stand-in. Canned replies are served first, in order;
// then rules are tried in insertion order. When neither yields a reply a
// strict backend throws BackendError, a lenient one repeats its last reply.
class ScriptedBackend final : public LMBackend {
 public:
  using Rule = std::function<std::optional<std::string>(const LMRequest&)>;

  explicit ScriptedBackend(std::vector<std::string> script = {}, bool strict = true);

  void add_rule(Rule rule);
  std::string complete(const LMRequest& request) override;
  BackendCapabilities capabilities() const override { return {true, false}; }

  std::vector<LMRequest> requests() const;
  std::size_t call_count() const;
  std::size_t call_count(CallRole role) const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> script_;
  std::size_t next_ = 0;
  bool strict_;
  std::vector<Rule> rules_;
  std::vector<LMRequest> requests_;
  std::string last_;
};

// Agent always turns left; offline calls abstain.
std::shared_ptr<ScriptedBackend> make_turn_left_backend();

// Offline stand-in for the full ECHO stack on one world. Summaries list the
// objects actually seen in the transcript, goal lists cover exactly those
// objects, and workflows come from bfs_plan on the reset world. The agent
// follows a known workflow for its goal step by step and otherwise explores
// using only what its observations show.
std::shared_ptr<ScriptedBackend> scripted_echo_backend(const GridWorld& world);

// Agent replays the conversation on a private copy of the world and plays
// the BFS-optimal action; offline calls behave as in scripted_echo_backend.
std::shared_ptr<ScriptedBackend> make_oracle_backend(const GridWorld& world);

// "turn-left", "bfs-demo" or "oracle". Throws ConfigError otherwise.
std::shared_ptr<ScriptedBackend> make_scripted_backend(std::string_view fixture, const GridWorld& world);

}  // namespace echogrid
