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
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "echogrid/textview.hpp"
#include "echogrid/world.hpp"

namespace echogrid {

inline constexpr int kDefaultHorizon = 64;
inline constexpr int kTrajectorySchemaVersion = 1;

struct StepRecord {
  std::string observation;
  std::string thought;
  int action = 0;
  bool valid = true;
  int reward = 0;
  int lm_calls = 0;  // LM requests spent choosing this action
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trajectory {
  Goal goal;
  std::vector<StepRecord> steps;
  bool success = false;
  int reward = 0;
  std::uint64_t env_seed = 0;
  int episode_index = 0;
  std::string diagnostic;  // set when the policy aborted the episode
  int aborted_lm_calls = 0;  // LM requests spent on the aborted decision
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct PolicyContext {
  const Goal& goal;
  const Observation& observation;
  std::span<const StepRecord> history;
  int step_index;
  int horizon;
};

struct Decision {
  std::string thought;
  int choice = 0;
  int lm_calls = 0;
};

// Chooses one action per step. Implementations keep whatever in-episode
// context they need between begin_episode calls; anything that must survive
// across episodes belongs to a memory strategy instead.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode(const Goal& goal, int horizon) { (void)goal, (void)horizon; }
  // Throws PolicyError when no action can be produced.
  virtual Decision decide(const PolicyContext& ctx) = 0;
};

// Runs render -> decide -> step until the goal holds or `horizon` steps have
// been taken. The world must be freshly reset; it is left in its final state.
Trajectory run_episode(GridWorld& world, const Goal& goal, Policy& policy, int horizon = kDefaultHorizon);

nlohmann::json trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const nlohmann::json& j);

// One compact JSON document per line.
std::string serialize(const Trajectory& t);
Trajectory deserialize(std::string_view line);

void write_jsonl(std::ostream& out, std::span<const Trajectory> trajectories);
// Throws FormatError naming the first malformed line (1-based).
std::vector<Trajectory> read_jsonl(std::istream& in);

// Plain-text transcript handed to the offline reflection calls.
std::string render_transcript(const Trajectory& t, int horizon = kDefaultHorizon);

}  // namespace echogrid
