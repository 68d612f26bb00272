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

// Rule tables behind the scripted backends. They read requests the way a
// model would: from the prompt text alone.

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/prompts.hpp"
#include "echogrid/textview.hpp"

namespace echogrid {

namespace {

struct SeenEntity {
  std::string color;
  std::string name;  // object kind or "door"
  bool closed = false;
  int ahead = 0;
  int right = 0;
};

int word_number(const std::string& w) {
  for (int n = 0; n <= 10; ++n) {
    if (number_word(n) == w) return n;
  }
  return std::atoi(w.c_str());
}

std::vector<SeenEntity> read_entities(const std::string& observation) {
  static const std::regex kSee(R"(You see an? (?:(open|closed) )?([a-z]+) ([a-z]+) ([^.]*)\.)");
  static const std::regex kAhead(R"(([a-z0-9]+) steps? ahead)");
  static const std::regex kSide(R"(([a-z0-9]+) steps? to the (left|right))");
  std::vector<SeenEntity> out;
  for (auto it = std::sregex_iterator(observation.begin(), observation.end(), kSee);
       it != std::sregex_iterator(); ++it) {
    SeenEntity e;
    e.closed = (*it)[1].str() == "closed";
    e.color = (*it)[2].str();
    e.name = (*it)[3].str();
    const std::string where = (*it)[4].str();
    std::smatch m;
    if (std::regex_search(where, m, kAhead)) e.ahead = word_number(m[1].str());
    if (std::regex_search(where, m, kSide)) e.right = word_number(m[1].str()) * (m[2].str() == "left" ? -1 : 1);
    out.push_back(e);
  }
  return out;
}

std::vector<int> read_valid_actions(const std::string& turn) {
  static const std::regex kValid(R"(valid_actions=\{([^}]*)\})");
  static const std::regex kIndex(R"((\d+):)");
  std::vector<int> out;
  std::smatch m;
  if (!std::regex_search(turn, m, kValid)) return out;
  const std::string body = m[1].str();
  for (auto it = std::sregex_iterator(body.begin(), body.end(), kIndex); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoi((*it)[1].str()));
  }
  return out;
}

std::string observation_of(const std::string& turn) {
  const auto at = turn.find("Observation: ");
  if (at == std::string::npos) return {};
  const auto end = turn.find('\n', at);
  return turn.substr(at + 13, end == std::string::npos ? std::string::npos : end - at - 13);
}

std::optional<Goal> goal_in(const std::string& text) {
  static const std::regex kGoal(R"(Goal: ([^\n]+))");
  std::smatch m;
  if (!std::regex_search(text, m, kGoal)) return std::nullopt;
  return parse_goal(m[1].str());
}

const ChatMessage* first_user(const LMRequest& r) {
  for (const auto& m : r.messages) {
    if (m.role == "user") return &m;
  }
  return nullptr;
}

const ChatMessage* last_user(const LMRequest& r) {
  for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it) {
    if (it->role == "user") return &*it;
  }
  return nullptr;
}

std::size_t assistant_turns(const LMRequest& r) {
  return static_cast<std::size_t>(
      std::count_if(r.messages.begin(), r.messages.end(), [](const ChatMessage& m) { return m.role == "assistant"; }));
}

std::map<std::string, std::string> known_workflows(const std::string& system_prompt) {
  std::map<std::string, std::string> out;
  const auto at = system_prompt.find(prompts::kWorkflowsHeading);
  if (at == std::string::npos) return out;
  std::istringstream lines(system_prompt.substr(at + prompts::kWorkflowsHeading.size()));
  std::string line;
  while (std::getline(lines, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    out.emplace(canonicalize_goal(line.substr(0, colon)), line.substr(colon + 2));
  }
  return out;
}

std::string choice_reply(std::string thought, Action a) {
  return nlohmann::json{{"thought", std::move(thought)}, {"choice", static_cast<int>(a)}}.dump();
}

// Approach a target seen at (ahead, right).
Action approach(const SeenEntity& e, bool can_forward) {
  if (e.ahead == 0) return e.right < 0 ? Action::TurnLeft : Action::TurnRight;
  if (e.right == 0 || can_forward) return can_forward ? Action::GoForward : Action::TurnRight;
  return e.right < 0 ? Action::TurnLeft : Action::TurnRight;
}

// Observation-driven exploration with no knowledge of the map.
std::pair<std::string, Action> explore(const Goal& goal, const std::string& turn) {
  const auto entities = read_entities(observation_of(turn));
  const auto valid = read_valid_actions(turn);
  const bool can_forward = std::find(valid.begin(), valid.end(), static_cast<int>(Action::GoForward)) != valid.end();
  const std::string want_color(to_string(goal.color));
  const std::string want_kind(to_string(goal.kind));

  for (const auto& e : entities) {
    if (e.color != want_color || e.name != want_kind) continue;
    if (e.ahead == 1 && e.right == 0) return {"The " + want_color + " " + want_kind + " is right in front of me.", Action::PickUp};
    return {"I can see the " + want_color + " " + want_kind + "; moving toward it.", approach(e, can_forward)};
  }
  // Doors are tried in an order that depends only on the goal, so episodes
  // with different goals wander into different rooms.
  const SeenEntity* door = nullptr;
  int best = 0;
  for (const auto& e : entities) {
    if (e.name != "door") continue;
    const auto c = color_from_string(e.color);
    const int rank = c ? (static_cast<int>(*c) + 6 - static_cast<int>(goal.color) + static_cast<int>(goal.kind)) % 6 : 6;
    if (!door || rank < best) {
      door = &e;
      best = rank;
    }
  }
  if (door) {
    if (door->ahead == 1 && door->right == 0 && door->closed) {
      return {"A closed door is in front of me; opening it.", Action::ToggleDoor};
    }
    return {"Heading for the " + door->color + " door to explore further.", approach(*door, can_forward)};
  }
  if (can_forward) return {"Nothing useful in view; moving forward.", Action::GoForward};
  return {"Blocked; turning right.", Action::TurnRight};
}

std::optional<std::string> explore_agent_reply(const LMRequest& r) {
  if (r.role != CallRole::Agent) return std::nullopt;
  const ChatMessage* first = first_user(r);
  const ChatMessage* last = last_user(r);
  if (!first || !last) return std::nullopt;
  const auto goal = goal_in(first->content);
  if (!goal) return std::nullopt;

  const auto workflows = known_workflows(r.system_prompt);
  const auto it = workflows.find(canonicalize_goal(render_goal(*goal)));
  if (it != workflows.end()) {
    if (const auto actions = parse_workflow_actions(it->second)) {
      const std::size_t k = assistant_turns(r);
      if (k < actions->size()) {
        return choice_reply("Following the known workflow, step action " + std::to_string(k + 1) + ".", (*actions)[k]);
      }
    }
  }
  auto [thought, action] = explore(*goal, last->content);
  return choice_reply(std::move(thought), action);
}

// Transcript facts the offline rules use.
struct TranscriptFacts {
  std::optional<Goal> goal;
  std::vector<std::vector<std::string>> sightings;  // new objects per step
  std::vector<std::string> doors;
  bool success = false;
  std::size_t steps = 0;
};

TranscriptFacts read_transcript(const std::string& text) {
  TranscriptFacts f;
  f.goal = goal_in(text);
  f.success = text.find("Outcome: success") != std::string::npos;
  std::vector<std::string> known;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("Observation: ", 0) != 0) continue;
    ++f.steps;
    std::vector<std::string> fresh;
    for (const auto& e : read_entities(line.substr(13))) {
      std::string name = e.color + " " + e.name;
      auto& bucket = e.name == "door" ? f.doors : known;
      if (std::find(bucket.begin(), bucket.end(), name) != bucket.end()) continue;
      bucket.push_back(name);
      if (e.name != "door") fresh.push_back(name);
    }
    f.sightings.push_back(std::move(fresh));
  }
  return f;
}

std::string join_the(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += i + 1 == names.size() ? " and " : ", ";
    out += "the " + names[i];
  }
  return out;
}

std::string summarize_reply(const std::string& transcript) {
  const TranscriptFacts f = read_transcript(transcript);
  nlohmann::json out = nlohmann::json::object();
  int n = 0;
  const auto first = f.sightings.empty() ? std::vector<std::string>{} : f.sightings.front();
  out[std::to_string(n++)] = "Agent spawned in the starting room and observed " +
                             (first.empty() ? std::string("no objects") : join_the(first));
  for (std::size_t i = 1; i < f.sightings.size(); ++i) {
    if (f.sightings[i].empty()) continue;
    out[std::to_string(n++)] = "Agent explored and discovered " + join_the(f.sightings[i]);
  }
  if (!f.doors.empty()) out[std::to_string(n++)] = "Agent passed near " + join_the(f.doors);
  if (f.goal) {
    const std::string g = std::string(to_string(f.goal->color)) + " " + std::string(to_string(f.goal->kind));
    out[std::to_string(n++)] = f.success ? "Agent interacted with the " + g + " resulting in picking it up"
                                         : "Agent did not manage to pick up the " + g;
  }
  return out.dump();
}

// Only objects the summary says were observed or picked up; a goal the
// agent merely failed at is not evidence of anything.
std::string identify_goals_reply(const std::string& summary) {
  static const std::regex kWord(R"([a-z]+)");
  std::vector<std::string> words;
  std::istringstream lines(summary);
  for (std::string line; std::getline(lines, line);) {
    if (line.find("did not manage") != std::string::npos) continue;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), kWord); it != std::sregex_iterator(); ++it) {
      words.push_back(it->str());
    }
    words.emplace_back();
  }
  nlohmann::json goals = nlohmann::json::array();
  std::vector<std::string> seen;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (!color_from_string(words[i]) || !kind_from_string(words[i + 1])) continue;
    const std::string g = "Pick up the " + words[i] + " " + words[i + 1];
    if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
    seen.push_back(g);
    goals.push_back(g);
  }
  return nlohmann::json{{"possible_goals", goals}}.dump();
}

// Workflow for `goal` from the world's starting state, or empty when the
// object does not exist or cannot be reached.
std::string home_workflow(const GridWorld& world, const Goal& goal) {
  GridWorld home = world;
  home.reset();
  if (!home.find_object(goal)) return {};
  const Plan plan = bfs_plan(home, goal);
  if (!plan.feasible) return {};
  return format_workflow(home, plan.actions);
}

void add_offline_rules(ScriptedBackend& backend, const GridWorld& world) {
  backend.add_rule([world](const LMRequest& r) -> std::optional<std::string> {
    const ChatMessage* user = first_user(r);
    const std::string text = user ? user->content : std::string{};
    switch (r.role) {
      case CallRole::Agent: return std::nullopt;
      case CallRole::Summarize: return summarize_reply(text);
      case CallRole::IdentifyGoals: return identify_goals_reply(text);
      case CallRole::InferTrajectory: {
        const auto goal = goal_in(text);
        static const std::regex kGoalLine(R"(Goal: ([^\n]+))");
        std::smatch m;
        const std::string label = std::regex_search(text, m, kGoalLine) ? m[1].str() : std::string{};
        return nlohmann::json{{"goal", label}, {"workflow", goal ? home_workflow(world, *goal) : std::string{}}}
            .dump();
      }
      case CallRole::Reflect: {
        const TranscriptFacts f = read_transcript(text);
        std::string note = f.success ? "I reached the goal in " + std::to_string(f.steps) + " steps."
                                     : "I did not reach the goal within the step budget.";
        std::vector<std::string> objects;
        for (const auto& s : f.sightings) objects.insert(objects.end(), s.begin(), s.end());
        if (!objects.empty()) note += " Objects seen: " + join_the(objects) + ".";
        return nlohmann::json{{"reflection", note}}.dump();
      }
      case CallRole::Workflow: {
        const TranscriptFacts f = read_transcript(text);
        const std::string label = f.goal ? render_goal(*f.goal) : std::string{};
        const std::string wf = f.success && f.goal ? home_workflow(world, *f.goal) : std::string{};
        return nlohmann::json{{"goal", label}, {"workflow", wf}}.dump();
      }
    }
    return std::nullopt;
  });
}

}  // namespace

std::shared_ptr<ScriptedBackend> make_turn_left_backend() {
  auto b = std::make_shared<ScriptedBackend>();
  b->add_rule([](const LMRequest& r) -> std::optional<std::string> {
    switch (r.role) {
      case CallRole::Agent: return choice_reply("Turning left.", Action::TurnLeft);
      case CallRole::Summarize: return R"({"0": "Agent spawned and turned in place."})";
      case CallRole::IdentifyGoals: return R"({"possible_goals": []})";
      case CallRole::InferTrajectory: return R"({"goal": "", "workflow": ""})";
      case CallRole::Reflect: return R"({"reflection": "Turning in place never reaches the goal."})";
      case CallRole::Workflow: return R"({"goal": "", "workflow": ""})";
    }
    return std::nullopt;
  });
  return b;
}

std::shared_ptr<ScriptedBackend> scripted_echo_backend(const GridWorld& world) {
  auto b = std::make_shared<ScriptedBackend>();
  b->add_rule(explore_agent_reply);
  add_offline_rules(*b, world);
  return b;
}

std::shared_ptr<ScriptedBackend> make_oracle_backend(const GridWorld& world) {
  auto b = std::make_shared<ScriptedBackend>();
  b->add_rule([world](const LMRequest& r) -> std::optional<std::string> {
    if (r.role != CallRole::Agent) return std::nullopt;
    const ChatMessage* first = first_user(r);
    const auto goal = first ? goal_in(first->content) : std::nullopt;
    if (!goal) return std::nullopt;
    GridWorld sim = world;
    sim.reset();
    for (const auto& m : r.messages) {
      if (m.role != "assistant") continue;
      const auto c = parse_choice(m.content);
      if (c && action_from_index(c.value().choice)) sim.step(*action_from_index(c.value().choice));
    }
    const Plan plan = bfs_plan(sim, *goal);
    if (!plan.feasible || plan.actions.empty()) return std::nullopt;
    return choice_reply("Shortest plan has " + std::to_string(plan.actions.size()) + " actions left.",
                        plan.actions.front());
  });
  add_offline_rules(*b, world);
  return b;
}

std::shared_ptr<ScriptedBackend> make_scripted_backend(std::string_view fixture, const GridWorld& world) {
  if (fixture == "turn-left") return make_turn_left_backend();
  if (fixture == "bfs-demo") return scripted_echo_backend(world);
  if (fixture == "oracle") return make_oracle_backend(world);
  throw ConfigError("unknown scripted fixture '" + std::string(fixture) +
                    "' (expected turn-left, bfs-demo or oracle)");
}

}  // namespace echogrid
