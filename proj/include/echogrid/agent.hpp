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

#include <memory>
#include <string>
#include <vector>

#include "echogrid/episode.hpp"
#include "echogrid/lm.hpp"

namespace echogrid {

// User turn for one step: goal (first step only), observation and menus.
std::string agent_turn_message(const PolicyContext& ctx);

// ReAct agent: one LM call per step with the full in-episode history.
// Unparseable replies get one reminder retry before the step is abandoned.
class ReActPolicy final : public Policy {
 public:
  ReActPolicy(std::shared_ptr<LMBackend> backend, std::string memory_text, LMParams params = {});

  void begin_episode(const Goal& goal, int horizon) override;
  Decision decide(const PolicyContext& ctx) override;

  const std::string& system_prompt() const noexcept { return system_prompt_; }
  const std::vector<ChatMessage>& messages() const noexcept { return messages_; }

 private:
  std::string ask(int calls_so_far);

  std::shared_ptr<LMBackend> backend_;
  std::string memory_text_;
  LMParams params_;
  std::string system_prompt_;
  std::vector<ChatMessage> messages_;
};

}  // namespace echogrid
