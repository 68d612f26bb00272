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

#include "echogrid/agent.hpp"

#include "echogrid/errors.hpp"
#include "echogrid/prompts.hpp"

namespace echogrid {

std::string agent_turn_message(const PolicyContext& ctx) {
  std::string out;
  if (ctx.step_index == 0) out += "Goal: " + render_goal(ctx.goal) + ".\n\n";
  out += "Step " + std::to_string(ctx.step_index + 1) + " of " + std::to_string(ctx.horizon) + ".\n";
  out += "Observation: " + ctx.observation.text + "\n";
  out += render_menus(ctx.observation.menus);
  return out;
}

ReActPolicy::ReActPolicy(std::shared_ptr<LMBackend> backend, std::string memory_text, LMParams params)
    : backend_(std::move(backend)), memory_text_(std::move(memory_text)), params_(params) {}

void ReActPolicy::begin_episode(const Goal&, int horizon) {
  system_prompt_ = prompts::agent_system_prompt(horizon, memory_text_);
  messages_.clear();
}

std::string ReActPolicy::ask(int calls_so_far) {
  LMRequest req{CallRole::Agent, system_prompt_, messages_, params_};
  try {
    return backend_->complete(req);
  } catch (const BackendError& e) {
    throw PolicyError(std::string("backend failure: ") + e.what(), calls_so_far + 1);
  }
}

Decision ReActPolicy::decide(const PolicyContext& ctx) {
  if (system_prompt_.empty()) begin_episode(ctx.goal, ctx.horizon);
  messages_.push_back({"user", agent_turn_message(ctx)});

  std::string problem;
  for (int calls = 1; calls <= 2; ++calls) {
    std::string reply = ask(calls - 1);
    const auto parsed = parse_choice(reply);
    messages_.push_back({"assistant", reply});
    if (parsed && action_from_index(parsed.value().choice)) {
      return Decision{parsed.value().thought, parsed.value().choice, calls};
    }
    problem = parsed ? "choice " + std::to_string(parsed.value().choice) + " is not an action index"
                     : parsed.error().message;
    if (calls == 1) messages_.push_back({"user", std::string(prompts::kChoiceReminder)});
  }
  throw PolicyError("unparseable agent output after retry: " + problem, 2);
}

}  // namespace echogrid
