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

#include "echogrid/prompts.hpp"

namespace echogrid::prompts {

const std::string_view kAgent =
    "You are an agent in a 2D gridworld. At each step you will receive a list of valid and invalid "
    "actions. Choose a valid action by its index. Complete the goal in #HORIZON# steps.\n"
    "\n"
    "You will be prompted at each turn to first reason about your plan and then choose actions.\n"
    "\n"
    "Reply concisely with following JSON format:\n"
    "{\"thought\": X, \"choice\": Y} where X is your reasoning and Y is the index of the desired "
    "choice. Ensure Y is a parseable integer!";

const std::string_view kReflexion =
    "You are an agent in a 2D text-based environment. Reflect on your performance in the following "
    "episode and write some concise notes on how you can improve your performance in the next "
    "episodes. Reply with the following JSON format: {\"reflection\": X}\n"
    "where X is your reflection. Ensure X is a parsable string!";

const std::string_view kAwm =
    "You are an agent in a 2D text-based environment. If the agent succeeds at accomplishing the "
    "given goal in the episode, convert the actions done in the following episode into abstract "
    "summary workflow. Discuss in high-level terms the steps a future agent should take to reach "
    "the goal. Include potential obstacles and landmarks in your workflow explanation.\n"
    "\n"
    "Reply with the following JSON format: {\"goal\": \"X\", \"workflow\": Y} where X is the "
    "achieved goal and Y is your summary workflow. Ensure X and Y are parsable strings!\n"
    "\n"
    "If the agent did not achieve the goal, then make Y an empty string.";

const std::string_view kSummarize =
    "You are an expert at analyzing agent behavior in 2D text-based environments. Create a concise, "
    "high-level summary of the agent's trajectory.\n"
    "\n"
    "## Instructions:\n"
    "\n"
    "**What to Include:**\n"
    "- Group low-level actions into high-level behaviors (e.g., \"explored northern corridor\" not "
    "individual moves)\n"
    "- **All** objects discovered\n"
    "- Completed objectives\n"
    "\n"
    "**What to Exclude:**\n"
    "- Individual movement steps, redundant actions, minor environmental details\n"
    "\n"
    "**Format:** Chronological entries representing distinct phases or achievements\n"
    "\n"
    "## Output Format:\n"
    "{\n"
    "  \"0\": \"Agent spawned in [location] and observed [key objects/features]\",\n"
    "  \"1\": \"Agent navigated to [destination] and discovered [important findings]\",\n"
    "  \"2\": \"Agent interacted with [object/entity] resulting in [outcome]\",\n"
    "  ...\n"
    "}";

const std::string_view kIdentifyGoals =
    "You are an expert at analyzing 2D text-based environments to identify potential agent "
    "objectives. Given a trajectory summary, extract all possible goals an agent could pursue. The "
    "agent's goal will always be to pick up a specific object.\n"
    "\n"
    "## Task:\n"
    "Identify all objects that could serve as pickup targets based on the environmental context "
    "shown in the summary.\n"
    "\n"
    "## Requirements:\n"
    "- **Extract specific objects** mentioned in the trajectory\n"
    "- Avoid locations or non-portable objects\n"
    "\n"
    "## Output Format:\n"
    "{\n"
    "  \"possible_goals\": [\n"
    "    \"Pick up the [object1]\",\n"
    "    \"Pick up the [object2]\",\n"
    "    ...\n"
    "  ]\n"
    "}";

const std::string_view kInferTrajectory =
    "You are an expert at creating action plans for agents in 2D text-based environments. Given a "
    "specific goal and a summary of a previous agent's actions, create a high-level workflow to "
    "achieve the goal.\n"
    "\n"
    "## Task:\n"
    "Design an abstract workflow for accomplishing the given goal using the environmental features "
    "from the trajectory summary.\n"
    "\n"
    "## Requirements:\n"
    "\n"
    "- **Environment-specific actions only**: reference actual locations, objects, or features from "
    "the summary\n"
    "\n"
    "- Use high-level abstractions (e.g., \"navigate to the blue door\")\n"
    "\n"
    "- **Avoid generic phrases** like \"move toward goal\" or \"find the object\"\n"
    "\n"
    "- Start from the agent's known starting location\n"
    "\n"
    "- Focus on strategic phases, not individual actions\n"
    "\n"
    "## Output Format:\n"
    "{\n"
    "  \"goal\": \"[provided goal]\",\n"
    "  \"workflow\": \"Step 1: [specific environment action]. Step 2: [specific environment "
    "action]. Step 3: [etc.]\"\n"
    "}";

const std::string_view kChoiceReminder =
    "Your previous reply could not be parsed. Reply with exactly one JSON object of the form "
    "{\"thought\": X, \"choice\": Y} where Y is the integer index of a valid action.";

const std::string_view kWorkflowsHeading = "Known workflows:";
const std::string_view kNotesHeading = "Notes from previous episodes:";

std::string agent_system_prompt(int horizon, std::string_view memory) {
  std::string out(kAgent);
  constexpr std::string_view kPlaceholder = "#HORIZON#";
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), std::to_string(horizon));
  if (!memory.empty()) {
    out += "\n\n";
    out += memory;
  }
  return out;
}

}  // namespace echogrid::prompts
