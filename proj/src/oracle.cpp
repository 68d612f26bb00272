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

#include "echogrid/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <regex>
#include <unordered_map>

#include "echogrid/errors.hpp"

namespace echogrid {

namespace {

constexpr std::size_t kMaxPlanDoors = 24;

// Packed search state: cell index (12 bits), facing (2), door bits (24),
// position of the object the agent started out carrying (1 + cell, 0 while
// still carried; 13 bits).
struct SearchState {
  int cell = 0;
  int facing = 0;
  std::uint32_t doors = 0;
  int dropped = 0;

  std::uint64_t key() const noexcept {
    return static_cast<std::uint64_t>(cell) | static_cast<std::uint64_t>(facing) << 12 |
           static_cast<std::uint64_t>(doors) << 14 | static_cast<std::uint64_t>(dropped) << 38;
  }
};

struct Visit {
  std::uint64_t parent;
  Action action;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Plan bfs_plan(const GridWorld& world, const Goal& goal) {
  const auto target = world.find_object(goal);
  if (!target) {
    throw ConfigError("goal names an object absent from the world: " + std::string(to_string(goal.color)) +
                      " " + std::string(to_string(goal.kind)));
  }
  const AgentPose& agent = world.agent();
  if (agent.carrying == target) return Plan{true, {}};
  if (world.doors().size() > kMaxPlanDoors) throw ConfigError("too many doors for the planner");

  const int w = world.width();
  const int h = world.height();
  auto index = [w](Pos p) { return p.y * w + p.x; };
  auto pos_of = [w](int i) { return Pos{i % w, i / w}; };

  // Static obstacles: every object on the grid other than the goal.
  std::vector<bool> blocked(static_cast<std::size_t>(w) * h, false);
  for (std::size_t i = 0; i < world.objects().size(); ++i) {
    const auto& o = world.objects()[i];
    if (i != *target && o.position) blocked[index(*o.position)] = true;
  }
  const Pos goal_pos = *world.objects()[*target].position;
  const bool carries_other = agent.carrying.has_value();

  std::vector<int> door_of(static_cast<std::size_t>(w) * h, -1);
  SearchState start;
  for (std::size_t d = 0; d < world.doors().size(); ++d) {
    door_of[index(world.doors()[d].position)] = static_cast<int>(d);
    if (world.doors()[d].state == DoorState::Open) start.doors |= 1u << d;
  }
  start.cell = index(agent.position);
  start.facing = static_cast<int>(agent.facing);

  auto occupied = [&](const SearchState& s, int cell) {
    return blocked[cell] || cell == index(goal_pos) || (carries_other && s.dropped == cell + 1);
  };
  auto passable = [&](const SearchState& s, Pos p) {
    if (!world.in_bounds(p)) return false;
    const int c = index(p);
    switch (world.cell(p)) {
      case CellType::Wall: return false;
      case CellType::Floor: return !occupied(s, c);
      case CellType::Door: return door_of[c] >= 0 && (s.doors >> door_of[c] & 1u);
    }
    return false;
  };

  std::unordered_map<std::uint64_t, Visit> seen;
  std::deque<SearchState> frontier;
  seen.emplace(start.key(), Visit{start.key(), Action::TurnLeft});
  frontier.push_back(start);

  auto unwind = [&](std::uint64_t key, Action last) {
    std::vector<Action> actions{last};
    while (key != start.key()) {
      const Visit& v = seen.at(key);
      actions.push_back(v.action);
      key = v.parent;
    }
    std::reverse(actions.begin(), actions.end());
    return Plan{true, std::move(actions)};
  };

  while (!frontier.empty()) {
    const SearchState s = frontier.front();
    frontier.pop_front();
    const Pos here = pos_of(s.cell);
    const auto facing = static_cast<Direction>(s.facing);
    const Pos f = offset(here, facing);
    const bool hands_free = !carries_other || s.dropped != 0;

    if (hands_free && f == goal_pos) return unwind(s.key(), Action::PickUp);

    for (int a = 0; a < kActionCount; ++a) {
      SearchState n = s;
      const auto action = static_cast<Action>(a);
      switch (action) {
        case Action::TurnLeft: n.facing = static_cast<int>(turn_left(facing)); break;
        case Action::TurnRight: n.facing = static_cast<int>(turn_right(facing)); break;
        case Action::GoForward:
          if (!passable(s, f)) continue;
          n.cell = index(f);
          break;
        case Action::PickUp: continue;
        case Action::PutDown:
          if (!carries_other || s.dropped != 0 || !world.in_bounds(f) ||
              world.cell(f) != CellType::Floor || occupied(s, index(f))) {
            continue;
          }
          n.dropped = index(f) + 1;
          break;
        case Action::ToggleDoor: {
          if (!world.in_bounds(f) || door_of[index(f)] < 0) continue;
          n.doors ^= 1u << door_of[index(f)];
          break;
        }
      }
      if (seen.emplace(n.key(), Visit{s.key(), action}).second) frontier.push_back(n);
    }
  }
  return Plan{false, {}};
}

void OraclePolicy::begin_episode(const Goal&, int) {
  plan_.clear();
  next_ = 0;
  consumed_ = 0;
}

Decision OraclePolicy::decide(const PolicyContext& ctx) {
  if (plan_.empty() || next_ >= plan_.size() || consumed_ != ctx.history.size()) {
    const Plan p = bfs_plan(world_, ctx.goal);
    if (!p.feasible || p.actions.empty()) throw PolicyError("no plan reaches the goal from this state");
    plan_ = p.actions;
    next_ = 0;
    consumed_ = ctx.history.size();
  }
  const Action a = plan_[next_++];
  ++consumed_;
  const nlohmann::json reply = {
      {"thought", "Shortest plan has " + std::to_string(plan_.size() - next_ + 1) +
                      " actions left; next is " + std::string(action_name(a)) + "."},
      {"choice", static_cast<int>(a)}};
  const auto parsed = parse_choice(reply.dump());
  if (!parsed) throw PolicyError("oracle produced unparseable output: " + parsed.error().message);
  return Decision{parsed.value().thought, parsed.value().choice, 0};
}

std::string format_workflow(const GridWorld& world, std::span<const Action> plan) {
  GridWorld sim = world;
  std::vector<std::string> phrases;
  for (std::size_t i = 0; i < plan.size();) {
    const Action a = plan[i];
    std::string phrase;
    std::size_t run = 1;
    switch (a) {
      case Action::TurnLeft:
      case Action::TurnRight:
      case Action::GoForward:
        while (i + run < plan.size() && plan[i + run] == a) ++run;
        phrase = std::string(action_name(a));
        if (run > 1) phrase += " " + std::to_string(run) + " times";
        break;
      case Action::PickUp:
      case Action::PutDown: {
        std::optional<std::size_t> obj =
            a == Action::PickUp ? sim.object_at(sim.front()) : sim.agent().carrying;
        phrase = std::string(action_name(a));
        if (obj) {
          const auto& o = sim.objects()[*obj];
          phrase += " the " + std::string(to_string(o.color)) + " " + std::string(to_string(o.kind));
        }
        break;
      }
      case Action::ToggleDoor: {
        const auto d = sim.door_at(sim.front());
        phrase = d ? "toggle the " + std::string(to_string(sim.doors()[*d].color)) + " door" : "toggle door";
        break;
      }
    }
    for (std::size_t k = 0; k < run; ++k) sim.step(plan[i + k]);
    i += run;
    phrases.push_back(std::move(phrase));
  }
  std::string out;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i) out += ' ';
    out += "Step " + std::to_string(i + 1) + ": " + phrases[i] + ".";
  }
  return out;
}

std::optional<std::vector<Action>> parse_workflow_actions(std::string_view workflow) {
  static const std::regex kStep(R"(step\s+\d+\s*:\s*([^.]*)\.?)", std::regex::icase);
  static const std::regex kMove(R"((turn left|turn right|go forward)(?:\s+(\d+)\s+times)?)");
  static const std::regex kToggle(R"(toggle(?: the [a-z]+)? door)");
  static const std::regex kPick(R"(pick up(?: the [a-z]+ [a-z]+)?)");
  static const std::regex kPut(R"(put down(?: the [a-z]+ [a-z]+)?)");
  const std::string text(workflow);
  std::vector<Action> out;
  bool any = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kStep); it != std::sregex_iterator(); ++it) {
    any = true;
    std::string phrase = lower((*it)[1].str());
    while (!phrase.empty() && std::isspace(static_cast<unsigned char>(phrase.back()))) phrase.pop_back();
    std::smatch m;
    if (std::regex_match(phrase, m, kMove)) {
      const int count = m[2].matched ? std::stoi(m[2].str()) : 1;
      if (count < 1 || count > 64) return std::nullopt;
      out.insert(out.end(), static_cast<std::size_t>(count), *action_from_name(m[1].str()));
    } else if (std::regex_match(phrase, kToggle)) {
      out.push_back(Action::ToggleDoor);
    } else if (std::regex_match(phrase, kPick)) {
      out.push_back(Action::PickUp);
    } else if (std::regex_match(phrase, kPut)) {
      out.push_back(Action::PutDown);
    } else {
      return std::nullopt;
    }
  }
  if (!any) return std::nullopt;
  return out;
}

std::vector<std::string> workflow_references(std::string_view workflow) {
  std::vector<std::string> out;
  const std::string text = lower(workflow);
  static const std::regex kWord(R"([a-z]+)");
  std::vector<std::string> words;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kWord); it != std::sregex_iterator(); ++it) {
    words.push_back(it->str());
  }
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (!color_from_string(words[i])) continue;
    if (words[i + 1] != "door" && !kind_from_string(words[i + 1])) continue;
    std::string ref = std::string(to_string(*color_from_string(words[i]))) + " " + words[i + 1];
    if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(std::move(ref));
  }
  return out;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> script, bool strict)
    : script_(std::move(script)), strict_(strict) {}

void ScriptedBackend::add_rule(Rule rule) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(rule));
}

std::string ScriptedBackend::complete(const LMRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (next_ < script_.size()) return last_ = script_[next_++];
  for (const auto& rule : rules_) {
    if (auto reply = rule(request)) return last_ = *reply;
  }
  if (!strict_ && !last_.empty()) return last_;
  throw BackendError("scripted backend has no reply for a " + std::string(to_string(request.role)) + " request");
}

std::vector<LMRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::size_t ScriptedBackend::call_count(CallRole role) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(requests_.begin(), requests_.end(),
                                                [role](const LMRequest& r) { return r.role == role; }));
}

}  // namespace echogrid
