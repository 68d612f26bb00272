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

#include "echogrid/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "echogrid/errors.hpp"
#include "echogrid/plot.hpp"
#include "echogrid/validity.hpp"

namespace echogrid::commands {

namespace fs = std::filesystem;

namespace {

bool non_empty_dir(const fs::path& p) {
  std::error_code ec;
  return fs::is_directory(p, ec) && !fs::is_empty(p, ec);
}

void prepare_out(const fs::path& out, bool force) {
  if (out.empty()) throw UsageError("--out is required");
  std::error_code ec;
  if (fs::exists(out, ec) && !fs::is_directory(out, ec)) throw IoError(out.string() + " exists and is not a directory");
  if (non_empty_dir(out) && !force) throw IoError(out.string() + " is not empty (use --force to overwrite)");
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
}

nlohmann::json parse_file(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_text_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

std::vector<GridWorld> worlds_for(const RunConfig& config) {
  if (!config.envs_dir.empty()) {
    auto worlds = load_worlds(config.envs_dir);
    std::vector<GridWorld> picked;
    for (auto seed : config.env_seeds) {
      auto it = std::find_if(worlds.begin(), worlds.end(), [&](const GridWorld& w) { return w.seed() == seed; });
      if (it == worlds.end()) throw ConfigError(config.envs_dir + " has no world with seed " + std::to_string(seed));
      picked.push_back(*it);
    }
    return picked;
  }
  std::vector<GridWorld> worlds;
  for (auto seed : config.env_seeds) worlds.push_back(generate(seed, config.gen));
  return worlds;
}

}  // namespace

std::string world_file_name(std::uint64_t seed) { return "world-" + std::to_string(seed) + ".json"; }

std::string gen(const GenOptions& o) {
  if (o.seeds.empty()) throw UsageError("gen needs at least one seed");
  if (std::set<std::uint64_t>(o.seeds.begin(), o.seeds.end()).size() != o.seeds.size()) {
    throw UsageError("gen: duplicate seeds");
  }
  validate(o.config);
  const fs::path out(o.out);
  prepare_out(out, o.force);
  nlohmann::json index = {{"schema_version", 1}, {"worlds", nlohmann::json::array()}};
  std::string report;
  for (auto seed : o.seeds) {
    const GridWorld world = generate(seed, o.config);
    write_text_file(out / world_file_name(seed), world_to_json(world).dump(2) + "\n");
    index["worlds"].push_back({{"seed", seed}, {"file", world_file_name(seed)}});
    if (o.verbose) report += "world " + std::to_string(seed) + "\n" + render_ascii(world) + "\n";
  }
  write_text_file(out / "index.json", index.dump(2) + "\n");
  report += "wrote " + std::to_string(o.seeds.size()) + " worlds to " + out.string() + "\n";
  return report;
}

std::string run(const RunOptions& o) {
  RunConfig config = o.config;
  fs::path out(o.out);
  if (!o.resume_config.empty()) {
    config = run_config_from_json(parse_file(o.resume_config));
    if (out.empty()) out = fs::path(o.resume_config).parent_path();
    if (out.empty()) out = ".";
  } else if (!o.envs.empty()) {
    config.envs_dir = fs::absolute(o.envs).lexically_normal().string();
    config.env_seeds.clear();
    const auto worlds = load_worlds(config.envs_dir);
    if (worlds.empty()) throw ConfigError(o.envs + " holds no worlds");
    for (const auto& w : worlds) config.env_seeds.push_back(w.seed());
    config.gen = worlds.front().config();
  }
  validate(config);
  const auto worlds = worlds_for(config);
  const auto factory = make_backend_factory(config.backend);  // fails fast on unknown ids and missing keys

  const bool resuming_in_place = !o.resume_config.empty() && o.out.empty();
  prepare_out(out, o.force || resuming_in_place);
  std::shared_ptr<AuditLog> audit;
  if (config.backend == "live") audit = std::make_shared<AuditLog>(out / "lm_calls.jsonl");
  const RunRecord record = run_stream(config, worlds, audit ? make_backend_factory(config.backend, audit) : factory);
  write_run(out, record);

  std::ostringstream r;
  int failed = 0, aborted = 0;
  std::uint64_t calls = 0;
  for (const auto& env : record.envs) {
    for (const auto& t : env.trajectories) {
      failed += t.success ? 0 : 1;
      aborted += t.diagnostic.empty() ? 0 : 1;
    }
    calls += env.agent_calls + env.strategy_calls;
  }
  const auto mean = mean_cumulative_average(record.summary());
  r << "strategy " << to_string(config.strategy) << ", backend " << config.backend << ": "
    << record.envs.size() << " envs x " << config.episodes_per_env << " episodes\n"
    << "failed episodes: " << failed << " (" << aborted << " aborted by the policy)\n"
    << "LM calls: " << calls << "\n"
    << "final cumulative-average reward: " << format_double(mean.back()) << "\n"
    << "wrote " << out.string() << "\n";
  return r.str();
}

std::string eval(const EvalOptions& o) {
  if (o.runs.empty()) throw UsageError("eval needs at least one --runs directory");
  if (o.baseline.empty()) throw UsageError("eval needs --baseline");
  if (o.out.empty()) throw UsageError("eval needs --out");
  const RunSummary base = read_run_summary(o.baseline);
  const auto base_avg = [&] {
    std::vector<std::vector<double>> v;
    for (const auto& env : base.envs) v.push_back(cumulative_average(env.rewards));
    return v;
  }();

  std::string csv = "run,strategy,env_seed,episode,cum_avg_reward,baseline_cum_avg_reward,gain\n";
  std::vector<Curve> curves;
  std::ostringstream r;
  for (const auto& dir : o.runs) {
    const RunSummary run = read_run_summary(dir);
    try {
      curves.push_back({run.strategy + " (" + fs::path(dir).filename().string() + ")", gain_over_baseline(run, base)});
    } catch (const ConfigError& e) {
      throw ConfigError(dir + " is not paired with baseline " + o.baseline + ": " + e.what());
    }
    for (std::size_t e = 0; e < run.envs.size(); ++e) {
      const auto avg = cumulative_average(run.envs[e].rewards);
      for (std::size_t k = 0; k < avg.size(); ++k) {
        csv += dir + "," + run.strategy + "," + std::to_string(run.envs[e].env_seed) + "," + std::to_string(k) + "," +
               format_double(avg[k]) + "," + format_double(base_avg[e][k]) + "," +
               format_double(avg[k] - base_avg[e][k]) + "\n";
      }
    }
    r << dir << " (" << run.strategy << "): gain over " << base.strategy << " at final episode "
      << format_double(curves.back().values.back()) << "\n";
  }
  write_text_file(o.out, csv);
  if (!o.plot.empty()) {
    write_text_file(o.plot, render_svg_chart(curves, "Cumulative-average reward gain over " + base.strategy,
                                             "gain in cumulative-average reward"));
  }
  return r.str();
}

std::string validate(const ValidateOptions& o) {
  if (o.samples < 1) throw UsageError("--samples must be at least 1");
  if (o.run.empty()) throw UsageError("validate needs --run");
  const fs::path dir(o.run);
  const RunConfig config = run_config_from_json(parse_file(dir / "config.json"));
  const fs::path last = dir / "memory" / (std::to_string(config.episodes_per_env - 1) + ".json");
  std::error_code ec;
  if (!fs::exists(last, ec)) throw IoError(dir.string() + " lacks memory snapshots");
  const auto snapshot = parse_file(last);
  const auto worlds = worlds_for(config);

  std::vector<ValidityPool> pools;
  try {
    for (const auto& env : snapshot.at("envs")) {
      const auto seed = env.at("env_seed").get<std::uint64_t>();
      auto it = std::find_if(worlds.begin(), worlds.end(), [&](const GridWorld& w) { return w.seed() == seed; });
      if (it == worlds.end()) throw FormatError(last.string() + ": unknown env seed " + std::to_string(seed));
      pools.push_back({*it, workflows_from_snapshot(env.at("memory"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(last.string() + ": " + e.what());
  }

  const auto factory = make_backend_factory(o.backend.empty() ? config.backend : o.backend);
  const ValidityResult result = validity_analysis(pools, factory, o.samples, o.seed, config.horizon);
  std::ostringstream r;
  r << result.headline() << "\n";
  int infeasible = 0, deviation = 0;
  for (const auto& c : result.cases) {
    if (!c.failure) continue;
    (*c.failure == FailureKind::Infeasible ? infeasible : deviation) += 1;
    r << "  env " << c.sample.env_seed << ", " << c.sample.entry.goal << ": " << to_string(*c.failure) << " ("
      << c.detail << ")\n";
  }
  if (!result.nothing_to_validate && result.successes < result.total) {
    r << "failures: " << deviation << " agent deviation, " << infeasible << " infeasible\n";
  }
  return r.str();
}

std::string format_replay(const Trajectory& t, std::optional<int> step) {
  const int n = static_cast<int>(t.steps.size());
  if (step && (*step < 0 || *step >= n)) {
    throw RangeError("step " + std::to_string(*step) + " is out of range (trajectory has " + std::to_string(n) +
                     " steps)");
  }
  std::ostringstream r;
  r << "Episode " << t.episode_index << " (env " << t.env_seed << "): " << render_goal(t.goal) << "\n";
  const int from = step ? *step : 0, to = step ? *step + 1 : n;
  for (int i = from; i < to; ++i) {
    const auto& s = t.steps[static_cast<std::size_t>(i)];
    const auto a = action_from_index(s.action);
    r << "Step " << i << "\n"
      << "  Observation: " << s.observation << "\n"
      << "  Thought: " << s.thought << "\n"
      << "  Action: " << s.action << " (" << (a ? action_name(*a) : "unknown") << ")"
      << (s.valid ? "" : " [invalid, no effect]") << "\n"
      << "  Reward: " << s.reward << "\n";
  }
  if (!step) {
    if (!t.diagnostic.empty()) r << "Aborted: " << t.diagnostic << "\n";
    r << "Outcome: " << (t.success ? "success" : "failure") << " after " << n << " steps, reward " << t.reward << "\n";
  }
  return r.str();
}

}  // namespace echogrid::commands
