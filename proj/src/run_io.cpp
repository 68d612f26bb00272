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

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "echogrid/errors.hpp"
#include "echogrid/harness.hpp"
#include "echogrid/textview.hpp"

namespace echogrid {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string metrics_csv(const RunRecord& record) {
  std::string out = "env_seed,episode,goal,reward,steps,cum_avg_reward,strategy\n";
  const std::string strategy(to_string(record.config.strategy));
  for (const auto& env : record.envs) {
    const auto rewards = env.rewards();
    const auto avg = cumulative_average(rewards);
    for (std::size_t k = 0; k < env.trajectories.size(); ++k) {
      const auto& t = env.trajectories[k];
      out += std::to_string(env.env_seed) + "," + std::to_string(k) + "," + render_goal(t.goal) + "," +
             std::to_string(t.reward) + "," + std::to_string(t.steps.size()) + "," + format_double(avg[k]) + "," +
             strategy + "\n";
    }
  }
  return out;
}

void write_run(const fs::path& dir, const RunRecord& record) {
  std::error_code ec;
  fs::create_directories(dir / "memory", ec);
  if (ec) throw IoError("cannot create " + (dir / "memory").string() + ": " + ec.message());

  write_text_file(dir / "config.json", run_config_to_json(record.config).dump(2) + "\n");
  write_text_file(dir / "metrics.csv", metrics_csv(record));

  std::ostringstream traj;
  for (const auto& env : record.envs) write_jsonl(traj, env.trajectories);
  write_text_file(dir / "trajectories.jsonl", traj.str());

  const int episodes = record.config.episodes_per_env;
  for (int k = 0; k < episodes; ++k) {
    nlohmann::json doc = {{"episode", k}, {"strategy", std::string(to_string(record.config.strategy))}};
    auto& envs = doc["envs"] = nlohmann::json::array();
    for (const auto& env : record.envs) {
      envs.push_back({{"env_seed", env.env_seed}, {"memory", env.snapshots.at(static_cast<std::size_t>(k))}});
    }
    write_text_file(dir / "memory" / (std::to_string(k) + ".json"), doc.dump(2) + "\n");
  }

  nlohmann::json calls = nlohmann::json::array();
  for (const auto& env : record.envs) {
    calls.push_back({{"env_seed", env.env_seed},
                     {"agent_calls", env.agent_calls},
                     {"strategy_calls", env.strategy_calls},
                     {"backend_calls", env.backend_calls}});
  }
  write_text_file(dir / "calls.json", calls.dump(2) + "\n");
}

RunSummary read_run_summary(const fs::path& dir) {
  RunConfig config;
  try {
    config = run_config_from_json(nlohmann::json::parse(read_text_file(dir / "config.json")));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / "config.json").string() + ": " + e.what());
  }
  RunSummary s{std::string(to_string(config.strategy)), config.goal_seed, config.episodes_per_env, {}};
  std::map<std::uint64_t, std::vector<int>> by_env;
  std::istringstream csv(read_text_file(dir / "metrics.csv"));
  std::string line;
  std::getline(csv, line);
  int line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    if (cols.size() != 7) throw FormatError("metrics.csv line " + std::to_string(line_no) + ": expected 7 columns");
    try {
      by_env[std::stoull(cols[0])].push_back(std::stoi(cols[3]));
    } catch (const std::exception&) {
      throw FormatError("metrics.csv line " + std::to_string(line_no) + ": bad number");
    }
  }
  for (auto seed : config.env_seeds) {
    auto it = by_env.find(seed);
    if (it == by_env.end()) throw FormatError("metrics.csv lacks env " + std::to_string(seed));
    s.envs.push_back({seed, it->second});
  }
  return s;
}

std::vector<GridWorld> load_worlds(const fs::path& dir) {
  std::vector<GridWorld> out;
  try {
    const auto index = nlohmann::json::parse(read_text_file(dir / "index.json"));
    for (const auto& entry : index.at("worlds")) {
      const auto file = dir / entry.at("file").get<std::string>();
      out.push_back(world_from_json(nlohmann::json::parse(read_text_file(file))));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / "index.json").string() + ": " + e.what());
  }
  return out;
}

}  // namespace echogrid
