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
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "echogrid/episode.hpp"
#include "echogrid/lm.hpp"
#include "echogrid/metrics.hpp"
#include "echogrid/strategies.hpp"
#include "echogrid/world.hpp"

namespace echogrid {

struct RunConfig {
  std::vector<std::uint64_t> env_seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int episodes_per_env = 16;
  int horizon = kDefaultHorizon;
  StrategyKind strategy = StrategyKind::React;
  std::string backend = "scripted:bfs-demo";
  std::uint64_t goal_seed = 0;
  int workers = 0;  // 0: one per env stream
  GenConfig gen;
  LMParams params;
  std::string envs_dir;  // where the world snapshots came from; empty when generated in memory

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void validate(const RunConfig& config);
nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& doc);

// `count` i.i.d. uniform draws over the world's objects.
std::vector<Goal> sample_goals(const GridWorld& world, int count, std::uint64_t seed);

// Goal-sampling seed for one env stream of a run.
std::uint64_t env_goal_seed(std::uint64_t run_goal_seed, std::uint64_t env_seed) noexcept;

struct EnvRecord {
  std::uint64_t env_seed = 0;
  std::vector<Goal> goals;
  std::vector<Trajectory> trajectories;
  std::vector<HindsightReport> hindsight;
  std::vector<nlohmann::json> snapshots;  // memory after each episode's update
  std::vector<WorkflowEntry> final_workflows;
  std::uint64_t agent_calls = 0;
  std::uint64_t strategy_calls = 0;
  std::uint64_t backend_calls = 0;  // as counted at the backend

  std::vector<int> rewards() const;
  std::vector<int> steps() const;
};

struct RunRecord {
  RunConfig config;
  std::vector<EnvRecord> envs;  // in env_seeds order

  RunSummary summary() const;
};

// Builds a backend for one env stream. Called once per env.
using BackendFactory = std::function<std::shared_ptr<LMBackend>(const GridWorld& world)>;

// "scripted:<fixture>" or "live". The live factory reads LM_* variables once
// and shares one client across envs; `audit` mirrors every call when set.
BackendFactory make_backend_factory(const std::string& id, std::shared_ptr<AuditLog> audit = nullptr);

// Runs every env stream. `worlds` pairs with config.env_seeds.
RunRecord run_stream(const RunConfig& config, const std::vector<GridWorld>& worlds, const BackendFactory& factory);

// Generates the worlds from the config, then runs.
RunRecord run_stream(const RunConfig& config, const BackendFactory& factory);

// Whole-file helpers; both throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Run directory layout.
void write_run(const std::filesystem::path& dir, const RunRecord& record);
std::string metrics_csv(const RunRecord& record);
std::string format_double(double v);

// Reads metrics.csv and config.json back into a pairing summary.
RunSummary read_run_summary(const std::filesystem::path& dir);

// Loads world snapshots listed in `dir`/index.json.
std::vector<GridWorld> load_worlds(const std::filesystem::path& dir);

}  // namespace echogrid
