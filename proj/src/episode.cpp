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

#include "echogrid/episode.hpp"

#include <sstream>

#include "echogrid/errors.hpp"

namespace echogrid {

Trajectory run_episode(GridWorld& world, const Goal& goal, Policy& policy, int horizon) {
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  Trajectory t;
  t.goal = goal;
  t.env_seed = world.seed();
  world.goal_satisfied(goal);  // rejects goals naming absent objects

  try {
    policy.begin_episode(goal, horizon);
  } catch (const PolicyError& e) {
    t.diagnostic = e.what();
    t.aborted_lm_calls = e.lm_calls();
    return t;
  }
  for (int i = 0; i < horizon; ++i) {
    const Observation obs = render(world);
    Decision d;
    try {
      d = policy.decide(PolicyContext{goal, obs, t.steps, i, horizon});
    } catch (const PolicyError& e) {
      t.diagnostic = "step " + std::to_string(i) + ": " + e.what();
      t.aborted_lm_calls = e.lm_calls();
      break;
    }
    const auto action = action_from_index(d.choice);
    if (!action) {
      t.diagnostic = "step " + std::to_string(i) + ": out-of-range action " + std::to_string(d.choice);
      t.aborted_lm_calls = d.lm_calls;
      break;
    }
    StepRecord rec;
    rec.observation = obs.text;
    rec.thought = std::move(d.thought);
    rec.action = d.choice;
    rec.lm_calls = d.lm_calls;
    rec.valid = !world.step(*action).no_op;
    if (world.goal_satisfied(goal)) {
      rec.reward = 1;
      t.steps.push_back(std::move(rec));
      t.success = true;
      t.reward = 1;
      break;
    }
    t.steps.push_back(std::move(rec));
  }
  return t;
}

nlohmann::json trajectory_to_json(const Trajectory& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"observation", s.observation},
                     {"thought", s.thought},
                     {"action", s.action},
                     {"valid", s.valid},
                     {"reward", s.reward},
                     {"lm_calls", s.lm_calls}});
  }
  return {{"schema_version", kTrajectorySchemaVersion},
          {"env_seed", t.env_seed},
          {"episode", t.episode_index},
          {"goal", render_goal(t.goal)},
          {"steps", steps},
          {"success", t.success},
          {"reward", t.reward},
          {"diagnostic", t.diagnostic},
          {"aborted_lm_calls", t.aborted_lm_calls}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw FormatError("trajectory record must be a JSON object");
    if (j.at("schema_version").get<int>() != kTrajectorySchemaVersion) {
      throw FormatError("unsupported trajectory schema_version");
    }
    Trajectory t;
    const auto goal = parse_goal(j.at("goal").get<std::string>());
    if (!goal) throw FormatError("unrecognized goal " + j.at("goal").dump());
    t.goal = *goal;
    t.env_seed = j.at("env_seed").get<std::uint64_t>();
    t.episode_index = j.at("episode").get<int>();
    t.success = j.at("success").get<bool>();
    t.reward = j.at("reward").get<int>();
    t.diagnostic = j.value("diagnostic", std::string{});
    t.aborted_lm_calls = j.value("aborted_lm_calls", 0);
    for (const auto& s : j.at("steps")) {
      StepRecord r;
      r.observation = s.at("observation").get<std::string>();
      r.thought = s.at("thought").get<std::string>();
      r.action = s.at("action").get<int>();
      if (!action_from_index(r.action)) throw FormatError("action index out of range");
      r.valid = s.at("valid").get<bool>();
      r.reward = s.at("reward").get<int>();
      r.lm_calls = s.value("lm_calls", 0);
      t.steps.push_back(std::move(r));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed trajectory record: ") + e.what());
  }
}

std::string serialize(const Trajectory& t) { return trajectory_to_json(t).dump(); }

Trajectory deserialize(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("trajectory record is not valid JSON");
  return trajectory_from_json(j);
}

void write_jsonl(std::ostream& out, std::span<const Trajectory> trajectories) {
  for (const auto& t : trajectories) out << serialize(t) << '\n';
}

std::vector<Trajectory> read_jsonl(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(deserialize(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string render_transcript(const Trajectory& t, int horizon) {
  std::ostringstream out;
  out << "Goal: " << render_goal(t.goal) << "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    const auto a = action_from_index(s.action);
    out << "\nStep " << i + 1 << "\n"
        << "Observation: " << s.observation << "\n"
        << "Thought: " << s.thought << "\n"
        << "Action: " << s.action << " (" << (a ? action_name(*a) : "unknown") << ")"
        << (s.valid ? "" : " [invalid, no effect]") << "\n";
  }
  out << "\nOutcome: ";
  if (t.success) {
    out << "success, the goal was achieved in " << t.steps.size() << " steps.";
  } else {
    out << "failure, the goal was not achieved within " << horizon << " steps.";
  }
  out << "\n";
  return out.str();
}

}  // namespace echogrid
