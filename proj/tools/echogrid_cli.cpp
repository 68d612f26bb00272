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

// echogrid command-line tool. Human output goes to stderr; machine-readable
// output (replay --raw) goes to stdout.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "echogrid/echogrid.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

int exit_code(echogrid_status s) {
  if (s == ECHOGRID_OK) return kExitOk;
  if (s == ECHOGRID_ERR_USAGE || s == ECHOGRID_ERR_ARGUMENT) return kExitUsage;
  return kExitError;
}

int report(echogrid_status s, char* text) {
  if (text) {
    std::cerr << text;
    echogrid_string_free(text);
  }
  if (s != ECHOGRID_OK) std::cerr << "error: " << echogrid_status_name(s) << ": " << echogrid_last_error() << "\n";
  return exit_code(s);
}

using Command = echogrid_status (*)(const char*, char**);

int call(Command fn, const nlohmann::json& options) {
  char* text = nullptr;
  const echogrid_status s = fn(options.dump().c_str(), &text);
  return report(s, text);
}

struct ReplayArgs {
  std::string trajectory;
  std::optional<int> step;
  std::optional<std::size_t> record;
  bool raw = false;
};

int replay(const ReplayArgs& a) {
  echogrid_trajectory_log* log = nullptr;
  echogrid_status s = echogrid_trajectory_log_open(a.trajectory.c_str(), &log);
  if (s != ECHOGRID_OK) return report(s, nullptr);
  std::size_t count = 0;
  echogrid_trajectory_log_count(log, &count);
  std::size_t from = 0, to = count;
  if (a.record) {
    from = *a.record;
    to = from + 1;
  }
  if (a.record && *a.record >= count) {
    char* text = nullptr;
    s = echogrid_trajectory_log_record(log, *a.record, &text);  // reports the range error
    echogrid_trajectory_log_free(log);
    return report(s, text);
  }
  int rc = kExitOk;
  for (std::size_t i = from; i < to && rc == kExitOk; ++i) {
    char* text = nullptr;
    if (a.raw) {
      s = echogrid_trajectory_log_record(log, i, &text);
      if (s == ECHOGRID_OK) {
        std::cout << text << "\n";
        echogrid_string_free(text);
        text = nullptr;
      }
    } else {
      s = echogrid_trajectory_log_format(log, i, a.step ? *a.step : -1, &text);
    }
    rc = report(s, text);
  }
  echogrid_trajectory_log_free(log);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hindsight workflow memory experiments on a text gridworld"};
  app.set_version_flag("--version", std::string(echogrid_version()));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate world snapshots");
  std::vector<std::uint64_t> seeds;
  std::optional<int> count;
  std::uint64_t base_seed = 0;
  std::string gen_out;
  bool force = false, verbose = false;
  auto* seeds_opt = gen->add_option("--seeds", seeds, "Explicit world seeds");
  auto* count_opt = gen->add_option("--count", count, "Number of worlds, seeded from --base-seed upward");
  gen->add_option("--base-seed", base_seed, "First seed for --count")->needs(count_opt);
  seeds_opt->excludes(count_opt);
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--force", force, "Overwrite a non-empty output directory");
  gen->add_flag("--verbose", verbose, "Print an ASCII map of each world");

  // run
  auto* run = app.add_subcommand("run", "Run env streams with a memory strategy");
  std::string envs, strategy = "react", backend = "scripted:bfs-demo", run_out, resume;
  int episodes = 16, horizon = 64;
  std::uint64_t goal_seed = 0;
  std::optional<int> workers;
  bool run_force = false;
  run->add_option("--envs", envs, "Directory written by gen");
  run->add_option("--strategy", strategy, "react | reflexion | awm | awmpp | echo")->capture_default_str();
  run->add_option("--backend", backend, "live | scripted:<turn-left|bfs-demo|oracle>")->capture_default_str();
  run->add_option("--episodes", episodes, "Episodes per env stream")->capture_default_str();
  run->add_option("--horizon", horizon, "Step budget per episode")->capture_default_str();
  run->add_option("--goal-seed", goal_seed, "Goal-sampling seed")->capture_default_str();
  run->add_option("--workers", workers, "Parallel env streams (default: one per env)");
  run->add_option("--out", run_out, "Run directory");
  run->add_option("--resume-config", resume, "Re-run from a saved config.json");
  run->add_flag("--force", run_force, "Overwrite a non-empty run directory");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare runs against a baseline run");
  std::vector<std::string> runs;
  std::string baseline, eval_out, plot;
  eval->add_option("--runs", runs, "Method run directories")->required();
  eval->add_option("--baseline", baseline, "Baseline run directory")->required();
  eval->add_option("--out", eval_out, "Merged CSV")->required();
  eval->add_option("--plot", plot, "SVG chart of cumulative-average gain");

  // validate
  auto* validate = app.add_subcommand("validate", "Replay stored workflows from a run's final memory");
  std::string validate_run, validate_backend;
  int samples = 40;
  std::uint64_t validate_seed = 0;
  validate->add_option("--run", validate_run, "Run directory")->required();
  validate->add_option("--samples", samples, "Number of (goal, workflow) samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate->add_option("--backend", validate_backend, "Agent backend (default: the run's)");
  validate->add_option("--seed", validate_seed, "Sampling seed")->capture_default_str();

  // replay
  auto* rep = app.add_subcommand("replay", "Pretty-print logged trajectories");
  ReplayArgs replay_args;
  rep->add_option("--trajectory", replay_args.trajectory, "trajectories.jsonl")->required();
  rep->add_option("--step", replay_args.step, "Show one step only")->check(CLI::NonNegativeNumber);
  rep->add_option("--record", replay_args.record, "Record index (default: all)");
  rep->add_flag("--raw", replay_args.raw, "Print records as JSONL on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    if (count) {
      if (*count < 1) {
        std::cerr << "error: --count must be at least 1\n";
        return kExitUsage;
      }
      seeds.clear();
      for (int i = 0; i < *count; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
    } else if (seeds.empty()) {
      std::cerr << "error: gen needs --seeds or --count\n";
      return kExitUsage;
    }
    return call(echogrid_gen, {{"seeds", seeds}, {"out", gen_out}, {"force", force}, {"verbose", verbose}});
  }
  if (run->parsed()) {
    nlohmann::json o = {{"force", run_force}};
    if (!resume.empty()) {
      o["resume_config"] = resume;
      if (!run_out.empty()) o["out"] = run_out;
    } else {
      o.update({{"strategy", strategy}, {"backend", backend}, {"episodes", episodes}, {"horizon", horizon},
                {"goal_seed", goal_seed}, {"out", run_out}});
      if (!envs.empty()) o["envs"] = envs;
      if (workers) o["workers"] = *workers;
    }
    return call(echogrid_run, o);
  }
  if (eval->parsed()) {
    return call(echogrid_eval, {{"runs", runs}, {"baseline", baseline}, {"out", eval_out}, {"plot", plot}});
  }
  if (validate->parsed()) {
    nlohmann::json o = {{"run", validate_run}, {"samples", samples}, {"seed", validate_seed}};
    if (!validate_backend.empty()) o["backend"] = validate_backend;
    return call(echogrid_validate, o);
  }
  return replay(replay_args);
}
