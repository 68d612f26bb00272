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

#include "echogrid/echogrid.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "echogrid/commands.hpp"
#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/textview.hpp"

struct echogrid_world {
  echogrid::GridWorld world;
};

struct echogrid_trajectory_log {
  std::vector<echogrid::Trajectory> records;
};

namespace {

using echogrid::commands::GenOptions;
using nlohmann::json;

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

echogrid_status fail(echogrid_status status, const std::string& message) {
  last_error = message;
  return status;
}

// NULL or malformed arguments.
struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
echogrid_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return ECHOGRID_OK;
  } catch (const echogrid::UsageError& e) {
    return fail(ECHOGRID_ERR_USAGE, e.what());
  } catch (const echogrid::ConfigError& e) {
    return fail(ECHOGRID_ERR_CONFIG, e.what());
  } catch (const echogrid::IoError& e) {
    return fail(ECHOGRID_ERR_IO, e.what());
  } catch (const echogrid::FormatError& e) {
    return fail(ECHOGRID_ERR_FORMAT, e.what());
  } catch (const echogrid::RangeError& e) {
    return fail(ECHOGRID_ERR_RANGE, e.what());
  } catch (const echogrid::BackendError& e) {
    return fail(ECHOGRID_ERR_BACKEND, e.what());
  } catch (const ArgumentError& e) {
    return fail(ECHOGRID_ERR_ARGUMENT, e.what());
  } catch (const json::exception& e) {
    return fail(ECHOGRID_ERR_ARGUMENT, std::string("invalid options: ") + e.what());
  } catch (const std::exception& e) {
    return fail(ECHOGRID_ERR_INTERNAL, e.what());
  }
}

template <typename T>
void require(T* p, const char* name) {
  if (!p) throw ArgumentError(std::string(name) + " must not be NULL");
}

json parse_options(const char* text, std::initializer_list<const char*> allowed) {
  require(text, "options_json");
  json j = json::parse(text);
  if (!j.is_object()) throw ArgumentError("options must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw echogrid::UsageError("unknown option '" + k + "'");
  }
  return j;
}

void report_out(char** report, const std::string& text) {
  if (report) *report = dup(text);
}

}  // namespace

extern "C" {

const char* echogrid_version(void) { return "0.1.0"; }

const char* echogrid_last_error(void) { return last_error.c_str(); }

const char* echogrid_status_name(echogrid_status status) {
  switch (status) {
    case ECHOGRID_OK: return "ok";
    case ECHOGRID_ERR_ARGUMENT: return "invalid argument";
    case ECHOGRID_ERR_USAGE: return "usage error";
    case ECHOGRID_ERR_CONFIG: return "configuration error";
    case ECHOGRID_ERR_IO: return "i/o error";
    case ECHOGRID_ERR_FORMAT: return "format error";
    case ECHOGRID_ERR_RANGE: return "range error";
    case ECHOGRID_ERR_BACKEND: return "backend error";
    case ECHOGRID_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void echogrid_string_free(char* s) { std::free(s); }

echogrid_status echogrid_world_generate(uint64_t seed, echogrid_world** out) {
  if (!out) return fail(ECHOGRID_ERR_ARGUMENT, "out must not be NULL");
  return guarded([&] { *out = new echogrid_world{echogrid::generate(seed)}; });
}

echogrid_status echogrid_world_from_json(const char* text, echogrid_world** out) {
  if (!text || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw echogrid::FormatError(e.what());
    }
    *out = new echogrid_world{echogrid::world_from_json(j)};
  });
}

echogrid_status echogrid_world_to_json(const echogrid_world* w, char** out) {
  if (!w || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] { *out = dup(echogrid::world_to_json(w->world).dump(2)); });
}

echogrid_status echogrid_world_ascii(const echogrid_world* w, char** out) {
  if (!w || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] { *out = dup(echogrid::render_ascii(w->world)); });
}

echogrid_status echogrid_world_observe(const echogrid_world* w, char** out) {
  if (!w || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    const auto obs = echogrid::render(w->world);
    *out = dup(obs.text + "\n" + echogrid::render_menus(obs.menus));
  });
}

echogrid_status echogrid_world_step(echogrid_world* w, int action, int* no_op) {
  if (!w) return fail(ECHOGRID_ERR_ARGUMENT, "world must not be NULL");
  const auto a = echogrid::action_from_index(action);
  if (!a) return fail(ECHOGRID_ERR_RANGE, "action index " + std::to_string(action) + " is out of range");
  return guarded([&] {
    const auto effect = w->world.step(*a);
    if (no_op) *no_op = effect.no_op ? 1 : 0;
  });
}

echogrid_status echogrid_world_reset(echogrid_world* w) {
  if (!w) return fail(ECHOGRID_ERR_ARGUMENT, "world must not be NULL");
  return guarded([&] { w->world.reset(); });
}

echogrid_status echogrid_world_plan(const echogrid_world* w, const char* goal_text, char** workflow, int* length) {
  if (!w || !goal_text || !workflow) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    const auto goal = echogrid::parse_goal(goal_text);
    if (!goal) throw echogrid::FormatError(std::string("not a pick-up goal: '") + goal_text + "'");
    if (!w->world.find_object(*goal)) throw echogrid::ConfigError("the world has no " + echogrid::canonicalize_goal(goal_text).substr(12));
    const auto plan = echogrid::bfs_plan(w->world, *goal);
    *workflow = dup(plan.feasible ? echogrid::format_workflow(w->world, plan.actions) : std::string{});
    if (length) *length = plan.feasible ? static_cast<int>(plan.actions.size()) : -1;
  });
}

void echogrid_world_free(echogrid_world* w) { delete w; }

echogrid_status echogrid_gen(const char* options, char** report) {
  return guarded([&] {
    const json j = parse_options(options, {"seeds", "out", "force", "verbose"});
    GenOptions o;
    o.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    o.out = j.value("out", std::string{});
    o.force = j.value("force", false);
    o.verbose = j.value("verbose", false);
    report_out(report, echogrid::commands::gen(o));
  });
}

echogrid_status echogrid_run(const char* options, char** report) {
  return guarded([&] {
    const json j = parse_options(options, {"envs", "env_seeds", "strategy", "backend", "episodes", "horizon",
                                           "goal_seed", "workers", "out", "resume_config", "force"});
    echogrid::commands::RunOptions o;
    auto& c = o.config;
    if (j.contains("strategy")) {
      const auto id = j.at("strategy").get<std::string>();
      const auto kind = echogrid::strategy_from_string(id);
      if (!kind) throw echogrid::UsageError("unknown strategy '" + id + "' (expected react, reflexion, awm, awmpp or echo)");
      c.strategy = *kind;
    }
    c.env_seeds = j.value("env_seeds", c.env_seeds);
    c.backend = j.value("backend", c.backend);
    c.episodes_per_env = j.value("episodes", c.episodes_per_env);
    c.horizon = j.value("horizon", c.horizon);
    c.goal_seed = j.value("goal_seed", c.goal_seed);
    c.workers = j.value("workers", c.workers);
    if (c.episodes_per_env < 1) throw echogrid::UsageError("--episodes must be at least 1");
    if (c.horizon < 1) throw echogrid::UsageError("--horizon must be at least 1");
    o.envs = j.value("envs", std::string{});
    o.out = j.value("out", std::string{});
    o.resume_config = j.value("resume_config", std::string{});
    o.force = j.value("force", false);
    if (o.resume_config.empty() && o.out.empty()) throw echogrid::UsageError("run needs --out or --resume-config");
    report_out(report, echogrid::commands::run(o));
  });
}

echogrid_status echogrid_eval(const char* options, char** report) {
  return guarded([&] {
    const json j = parse_options(options, {"runs", "baseline", "out", "plot"});
    echogrid::commands::EvalOptions o;
    o.runs = j.value("runs", std::vector<std::string>{});
    o.baseline = j.value("baseline", std::string{});
    o.out = j.value("out", std::string{});
    o.plot = j.value("plot", std::string{});
    report_out(report, echogrid::commands::eval(o));
  });
}

echogrid_status echogrid_validate(const char* options, char** report) {
  return guarded([&] {
    const json j = parse_options(options, {"run", "samples", "backend", "seed"});
    echogrid::commands::ValidateOptions o;
    o.run = j.value("run", std::string{});
    o.samples = j.value("samples", o.samples);
    o.backend = j.value("backend", std::string{});
    o.seed = j.value("seed", o.seed);
    report_out(report, echogrid::commands::validate(o));
  });
}

echogrid_status echogrid_trajectory_log_open(const char* path, echogrid_trajectory_log** out) {
  if (!path || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw echogrid::IoError(std::string("cannot open ") + path);
    try {
      *out = new echogrid_trajectory_log{echogrid::read_jsonl(in)};
    } catch (const echogrid::FormatError& e) {
      throw echogrid::FormatError(std::string(path) + ": " + e.what());
    }
  });
}

echogrid_status echogrid_trajectory_log_count(const echogrid_trajectory_log* log, size_t* count) {
  if (!log || !count) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  *count = log->records.size();
  return ECHOGRID_OK;
}

echogrid_status echogrid_trajectory_log_format(const echogrid_trajectory_log* log, size_t index, int step,
                                               char** out) {
  if (!log || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    if (index >= log->records.size()) {
      throw echogrid::RangeError("record " + std::to_string(index) + " is out of range (log has " +
                                 std::to_string(log->records.size()) + " records)");
    }
    const auto& t = log->records[index];
    *out = dup(echogrid::commands::format_replay(t, step < 0 ? std::nullopt : std::optional<int>(step)));
  });
}

echogrid_status echogrid_trajectory_log_record(const echogrid_trajectory_log* log, size_t index, char** out) {
  if (!log || !out) return fail(ECHOGRID_ERR_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    if (index >= log->records.size()) {
      throw echogrid::RangeError("record " + std::to_string(index) + " is out of range (log has " +
                                 std::to_string(log->records.size()) + " records)");
    }
    *out = dup(echogrid::serialize(log->records[index]));
  });
}

void echogrid_trajectory_log_free(echogrid_trajectory_log* log) { delete log; }

}  // extern "C"
