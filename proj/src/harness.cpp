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

#include "echogrid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "echogrid/agent.hpp"
#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/rng.hpp"

namespace echogrid {

void validate(const RunConfig& c) {
  if (c.env_seeds.empty()) throw ConfigError("run config: no env seeds");
  if (std::set<std::uint64_t>(c.env_seeds.begin(), c.env_seeds.end()).size() != c.env_seeds.size()) {
    throw ConfigError("run config: duplicate env seeds");
  }
  if (c.episodes_per_env < 1) throw ConfigError("run config: episodes_per_env must be at least 1");
  if (c.horizon < 1) throw ConfigError("run config: horizon must be at least 1");
  if (c.workers < 0) throw ConfigError("run config: workers must be non-negative");
  if (c.params.max_new_tokens < 1) throw ConfigError("run config: max_new_tokens must be positive");
  validate(c.gen);
  if (c.backend != "live" && c.backend.rfind("scripted:", 0) != 0) {
    throw ConfigError("unknown backend '" + c.backend + "' (expected live or scripted:<fixture>)");
  }
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  return {
      {"schema_version", 1},
      {"env_seeds", c.env_seeds},
      {"episodes_per_env", c.episodes_per_env},
      {"horizon", c.horizon},
      {"strategy", std::string(to_string(c.strategy))},
      {"backend", c.backend},
      {"goal_seed", c.goal_seed},
      {"workers", c.workers},
      {"gen", {{"width", c.gen.width}, {"height", c.gen.height}, {"rooms", c.gen.rooms}, {"objects", c.gen.objects}}},
      {"params", {{"temperature", c.params.temperature}, {"max_new_tokens", c.params.max_new_tokens}}},
      {"envs_dir", c.envs_dir},
  };
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (j.at("schema_version").get<int>() != 1) throw FormatError("run config: unsupported schema_version");
    c.env_seeds = j.at("env_seeds").get<std::vector<std::uint64_t>>();
    c.episodes_per_env = j.at("episodes_per_env").get<int>();
    c.horizon = j.at("horizon").get<int>();
    const auto strategy = j.at("strategy").get<std::string>();
    const auto kind = strategy_from_string(strategy);
    if (!kind) throw ConfigError("unknown strategy '" + strategy + "'");
    c.strategy = *kind;
    c.backend = j.at("backend").get<std::string>();
    c.goal_seed = j.at("goal_seed").get<std::uint64_t>();
    c.workers = j.value("workers", 0);
    const auto& g = j.at("gen");
    c.gen = {g.at("width").get<int>(), g.at("height").get<int>(), g.at("rooms").get<int>(), g.at("objects").get<int>()};
    const auto& p = j.at("params");
    c.params.temperature = p.at("temperature").get<double>();
    c.params.max_new_tokens = p.at("max_new_tokens").get<int>();
    c.envs_dir = j.value("envs_dir", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("run config: ") + e.what());
  }
  validate(c);
  return c;
}

std::vector<Goal> sample_goals(const GridWorld& world, int count, std::uint64_t seed) {
  const auto& objects = world.objects();
  if (objects.empty()) throw ConfigError("sample_goals: world has no objects");
  Rng rng(seed);
  std::vector<Goal> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const auto& o = objects[rng.below(objects.size())];
    out.push_back(Goal{o.color, o.kind});
  }
  return out;
}

std::uint64_t env_goal_seed(std::uint64_t run_goal_seed, std::uint64_t env_seed) noexcept {
  return Rng::stream(run_goal_seed, env_seed).next();
}

std::vector<int> EnvRecord::rewards() const {
  std::vector<int> out;
  for (const auto& t : trajectories) out.push_back(t.reward);
  return out;
}

std::vector<int> EnvRecord::steps() const {
  std::vector<int> out;
  for (const auto& t : trajectories) out.push_back(static_cast<int>(t.steps.size()));
  return out;
}

RunSummary RunRecord::summary() const {
  RunSummary s{std::string(to_string(config.strategy)), config.goal_seed, config.episodes_per_env, {}};
  for (const auto& env : envs) s.envs.push_back({env.env_seed, env.rewards()});
  return s;
}

BackendFactory make_backend_factory(const std::string& id, std::shared_ptr<AuditLog> audit) {
  auto wrap = [audit](std::shared_ptr<LMBackend> b) -> std::shared_ptr<LMBackend> {
    if (!audit) return b;
    return std::make_shared<AuditingBackend>(std::move(b), audit);
  };
  if (id == "live") {
    auto live = wrap(std::make_shared<LiveBackend>(LiveConfig::from_env()));
    return [live](const GridWorld&) { return live; };
  }
  if (id.rfind("scripted:", 0) == 0) {
    const std::string fixture = id.substr(9);
    make_scripted_backend(fixture, generate(0));  // rejects unknown fixtures up front
    return [fixture, wrap](const GridWorld& world) { return wrap(make_scripted_backend(fixture, world)); };
  }
  throw ConfigError("unknown backend '" + id + "' (expected live or scripted:<fixture>)");
}

namespace {

EnvRecord run_env(const RunConfig& config, const GridWorld& start, const BackendFactory& factory) {
  EnvRecord rec;
  rec.env_seed = start.seed();
  auto backend = std::make_shared<CountingBackend>(factory(start));
  auto strategy = make_strategy(config.strategy, OfflineOptions{config.params, 8, config.horizon});
  rec.goals = sample_goals(start, config.episodes_per_env, env_goal_seed(config.goal_seed, start.seed()));

  GridWorld world = start;
  for (int k = 0; k < config.episodes_per_env; ++k) {
    world.reset();
    ReActPolicy policy(backend, strategy->render_memory(), config.params);
    Trajectory t = run_episode(world, rec.goals[static_cast<std::size_t>(k)], policy, config.horizon);
    t.env_seed = start.seed();
    t.episode_index = k;
    for (const auto& s : t.steps) rec.agent_calls += static_cast<std::uint64_t>(s.lm_calls);
    rec.agent_calls += static_cast<std::uint64_t>(t.aborted_lm_calls);

    HindsightReport report = strategy->after_episode(*backend, t);
    rec.strategy_calls += static_cast<std::uint64_t>(report.lm_calls);
    rec.hindsight.push_back(std::move(report));
    rec.snapshots.push_back(strategy->snapshot());
    rec.trajectories.push_back(std::move(t));
  }
  rec.final_workflows = strategy->workflows();
  rec.backend_calls = backend->calls();
  return rec;
}

}  // namespace

RunRecord run_stream(const RunConfig& config, const std::vector<GridWorld>& worlds, const BackendFactory& factory) {
  validate(config);
  if (worlds.size() != config.env_seeds.size()) throw ConfigError("run_stream: world count differs from env seeds");
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    if (worlds[i].seed() != config.env_seeds[i]) {
      throw ConfigError("run_stream: world " + std::to_string(i) + " has seed " + std::to_string(worlds[i].seed()) +
                        ", expected " + std::to_string(config.env_seeds[i]));
    }
  }

  RunRecord record{config, std::vector<EnvRecord>(worlds.size())};
  std::vector<std::exception_ptr> errors(worlds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < worlds.size(); i = next++) {
      try {
        record.envs[i] = run_env(config, worlds[i], factory);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(worlds.size(), config.workers > 0 ? static_cast<std::size_t>(config.workers) : worlds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return record;
}

RunRecord run_stream(const RunConfig& config, const BackendFactory& factory) {
  validate(config);
  std::vector<GridWorld> worlds;
  for (auto seed : config.env_seeds) worlds.push_back(generate(seed, config.gen));
  return run_stream(config, worlds, factory);
}

}  // namespace echogrid
