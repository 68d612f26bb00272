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

#include <string>
#include <string_view>

namespace echogrid::prompts {

// System prompts. The agent prompt carries a #HORIZON# placeholder.
extern const std::string_view kAgent;
extern const std::string_view kReflexion;
extern const std::string_view kAwm;
extern const std::string_view kSummarize;
extern const std::string_view kIdentifyGoals;
extern const std::string_view kInferTrajectory;

// Reminder sent once after an unparseable agent reply.
extern const std::string_view kChoiceReminder;

// Headings used when memory is injected into the agent's system prompt.
extern const std::string_view kWorkflowsHeading;
extern const std::string_view kNotesHeading;

std::string agent_system_prompt(int horizon, std::string_view memory);

}  // namespace echogrid::prompts
