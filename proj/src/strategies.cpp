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

#include "echogrid/strategies.hpp"

#include <algorithm>
#include <cctype>

#include "echogrid/errors.hpp"
#include "echogrid/prompts.hpp"
#include "echogrid/textview.hpp"

namespace echogrid {

namespace {

constexpr std::array<std::string_view, 5> kStrategyNames = {"react", "reflexion", "awm", "awmpp", "echo"};

std::string display_goal(std::string_view canonical) {
  if (const auto g = parse_goal(canonical)) return render_goal(*g);
  std::string out(canonical);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string summary_text(const std::vector<std::string>& entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out += std::to_string(i) + ": " + entries[i] + "\n";
  }
  return out;
}

LMRequest offline_request(CallRole role, std::string_view system, std::string user,
                          const OfflineOptions& options) {
  return LMRequest{role, std::string(system), {{"user", std::move(user)}}, options.params};
}

// Calls the backend; BackendError becomes a diagnostic and an empty reply.
std::optional<std::string> call(LMBackend& backend, const LMRequest& req, HindsightReport& report) {
  ++report.lm_calls;
  try {
    return backend.complete(req);
  } catch (const BackendError& e) {
    report.diagnostics.push_back(std::string(to_string(req.role)) + ": backend failure: " + e.what());
    return std::nullopt;
  }
}

// AWM's hindsight rule: one call, empty workflow means the LM judged the
// episode a failure.
std::optional<WorkflowEntry> awm_hindsight(LMBackend& backend, const Trajectory& trajectory,
                                           const OfflineOptions& options, HindsightReport& report) {
  const auto reply = call(backend,
                          offline_request(CallRole::Workflow, prompts::kAwm,
                                          render_transcript(trajectory, options.horizon), options),
                          report);
  if (!reply) return std::nullopt;
  static const std::array<PayloadField, 2> kFields = {PayloadField{"goal", FieldType::Text},
                                                      PayloadField{"workflow", FieldType::Text}};
  const auto parsed = parse_json_payload(*reply, kFields);
  if (!parsed) {
    report.diagnostics.push_back("workflow: " + parsed.error().message);
    return std::nullopt;
  }
  const auto& workflow = std::get<std::string>(parsed.value().at("workflow"));
  if (workflow.empty()) return std::nullopt;
  std::string goal = canonicalize_goal(std::get<std::string>(parsed.value().at("goal")));
  if (goal.empty()) goal = canonicalize_goal(render_goal(trajectory.goal));
  report.goals.push_back(goal);
  return WorkflowEntry{goal, workflow};
}

class ReactStrategy final : public MemoryStrategy {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::React; }
  HindsightReport after_episode(LMBackend&, const Trajectory&) override { return {}; }
  std::string render_memory() const override { return {}; }
  nlohmann::json snapshot() const override { return {{"strategy", "react"}}; }
};

class ReflexionStrategy final : public MemoryStrategy {
 public:
  explicit ReflexionStrategy(OfflineOptions o) : options_(o) {}
  StrategyKind kind() const noexcept override { return StrategyKind::Reflexion; }
  HindsightReport after_episode(LMBackend& b, const Trajectory& t) override {
    return reflexion_after_episode(b, t, memory_, options_);
  }
  std::string render_memory() const override { return render_notes(memory_); }
  nlohmann::json snapshot() const override {
    return {{"strategy", "reflexion"}, {"reflections", memory_.reflections}};
  }

 private:
  OfflineOptions options_;
  SemanticMemory memory_;
};

nlohmann::json entries_json(const std::vector<WorkflowEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) out.push_back({{"goal", e.goal}, {"workflow", e.workflow}});
  return out;
}

class AwmStrategy final : public MemoryStrategy {
 public:
  explicit AwmStrategy(OfflineOptions o) : options_(o) {}
  StrategyKind kind() const noexcept override { return StrategyKind::Awm; }
  HindsightReport after_episode(LMBackend& b, const Trajectory& t) override {
    return awm_after_episode(b, t, log_, options_);
  }
  std::string render_memory() const override { return render_workflows(log_); }
  nlohmann::json snapshot() const override { return {{"strategy", "awm"}, {"workflows", entries_json(log_)}}; }
  std::vector<WorkflowEntry> workflows() const override { return log_; }

 private:
  OfflineOptions options_;
  WorkflowLog log_;
};

class BufferStrategy final : public MemoryStrategy {
 public:
  BufferStrategy(StrategyKind kind, OfflineOptions o) : kind_(kind), options_(o) {}
  StrategyKind kind() const noexcept override { return kind_; }
  HindsightReport after_episode(LMBackend& b, const Trajectory& t) override {
    return kind_ == StrategyKind::Echo ? echo_after_episode(b, t, buffer_, options_)
                                       : awmpp_after_episode(b, t, buffer_, options_);
  }
  std::string render_memory() const override { return render_workflows(buffer_.entries()); }
  nlohmann::json snapshot() const override {
    return {{"strategy", to_string(kind_)}, {"entries", entries_json(buffer_.entries())}};
  }
  std::vector<WorkflowEntry> workflows() const override { return buffer_.entries(); }

 private:
  StrategyKind kind_;
  OfflineOptions options_;
  ReplayBuffer buffer_;
};

}  // namespace

std::string_view to_string(UpdateOutcome o) noexcept {
  switch (o) {
    case UpdateOutcome::Inserted: return "inserted";
    case UpdateOutcome::Replaced: return "replaced";
    case UpdateOutcome::Kept: return "kept";
    case UpdateOutcome::Rejected: return "rejected";
  }
  return "unknown";
}

UpdateOutcome ReplayBuffer::update(std::string_view goal, std::string workflow) {
  if (workflow.empty()) return UpdateOutcome::Rejected;
  std::string key = canonicalize_goal(goal);
  if (key.empty()) return UpdateOutcome::Rejected;
  for (auto& e : entries_) {
    if (e.goal != key) continue;
    if (workflow.size() < e.workflow.size()) {
      e.workflow = std::move(workflow);
      return UpdateOutcome::Replaced;
    }
    return UpdateOutcome::Kept;
  }
  entries_.push_back({std::move(key), std::move(workflow)});
  return UpdateOutcome::Inserted;
}

const std::string* ReplayBuffer::find(std::string_view goal) const {
  const std::string key = canonicalize_goal(goal);
  for (const auto& e : entries_) {
    if (e.goal == key) return &e.workflow;
  }
  return nullptr;
}

Parsed<std::vector<std::string>> parse_summary(std::string_view text) {
  const auto obj = extract_json_object(text);
  if (!obj) return ParseError{"no JSON object found in summary", {}};
  std::vector<std::pair<long, std::string>> numbered;
  std::vector<std::string> other;
  for (const auto& [key, value] : obj->items()) {
    std::string v = value.is_string() ? value.get<std::string>()
                                      : value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    const bool numeric = !key.empty() && key.size() < 10 &&
                         std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (numeric) numbered.emplace_back(std::stol(key), std::move(v));
    else other.push_back(std::move(v));
  }
  std::stable_sort(numbered.begin(), numbered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (auto& [k, v] : numbered) out.push_back(std::move(v));
  for (auto& v : other) out.push_back(std::move(v));
  return out;
}

HindsightReport echo_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                   ReplayBuffer& buffer, const OfflineOptions& options) {
  HindsightReport report;
  const auto summary_reply =
      call(backend,
           offline_request(CallRole::Summarize, prompts::kSummarize,
                           render_transcript(trajectory, options.horizon), options),
           report);
  if (!summary_reply) return report;
  const auto summary = parse_summary(*summary_reply);
  if (!summary) {
    report.diagnostics.push_back("summarize: " + summary.error().message);
    return report;
  }
  const std::string summary_block = "Trajectory summary:\n" + summary_text(summary.value());

  const auto goals_reply =
      call(backend, offline_request(CallRole::IdentifyGoals, prompts::kIdentifyGoals, summary_block, options),
           report);
  if (!goals_reply) return report;
  static const std::array<PayloadField, 1> kGoalFields = {PayloadField{"possible_goals", FieldType::TextList}};
  const auto goals = parse_json_payload(*goals_reply, kGoalFields);
  if (!goals) {
    report.diagnostics.push_back("identify_goals: " + goals.error().message);
    return report;
  }
  for (const auto& raw : std::get<std::vector<std::string>>(goals.value().at("possible_goals"))) {
    std::string g = canonicalize_goal(raw);
    if (g.empty() || std::find(report.goals.begin(), report.goals.end(), g) != report.goals.end()) continue;
    if (report.goals.size() >= options.max_goals) break;
    report.goals.push_back(std::move(g));
  }

  static const std::array<PayloadField, 2> kTrajFields = {PayloadField{"goal", FieldType::Text},
                                                          PayloadField{"workflow", FieldType::Text}};
  for (const auto& goal : report.goals) {
    const auto reply = call(backend,
                            offline_request(CallRole::InferTrajectory, prompts::kInferTrajectory,
                                            "Goal: " + display_goal(goal) + "\n\n" + summary_block, options),
                            report);
    if (!reply) {
      report.outcomes.push_back(UpdateOutcome::Rejected);
      continue;
    }
    const auto parsed = parse_json_payload(*reply, kTrajFields);
    if (!parsed) {
      report.diagnostics.push_back("infer_traj(" + goal + "): " + parsed.error().message);
      report.outcomes.push_back(UpdateOutcome::Rejected);
      continue;
    }
    report.outcomes.push_back(buffer.update(goal, std::get<std::string>(parsed.value().at("workflow"))));
  }
  return report;
}

HindsightReport reflexion_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                        SemanticMemory& memory, const OfflineOptions& options) {
  HindsightReport report;
  const auto reply = call(backend,
                          offline_request(CallRole::Reflect, prompts::kReflexion,
                                          render_transcript(trajectory, options.horizon), options),
                          report);
  if (!reply) return report;
  static const std::array<PayloadField, 1> kFields = {PayloadField{"reflection", FieldType::Text}};
  const auto parsed = parse_json_payload(*reply, kFields);
  if (!parsed) {
    report.diagnostics.push_back("reflect: " + parsed.error().message);
    return report;
  }
  memory.reflections.push_back(std::get<std::string>(parsed.value().at("reflection")));
  return report;
}

HindsightReport awm_after_episode(LMBackend& backend, const Trajectory& trajectory, WorkflowLog& log,
                                  const OfflineOptions& options) {
  HindsightReport report;
  if (auto entry = awm_hindsight(backend, trajectory, options, report)) {
    log.push_back(std::move(*entry));
    report.outcomes.push_back(UpdateOutcome::Inserted);
  }
  return report;
}

HindsightReport awmpp_after_episode(LMBackend& backend, const Trajectory& trajectory,
                                    ReplayBuffer& buffer, const OfflineOptions& options) {
  HindsightReport report;
  if (auto entry = awm_hindsight(backend, trajectory, options, report)) {
    report.outcomes.push_back(buffer.update(entry->goal, std::move(entry->workflow)));
  }
  return report;
}

std::string render_workflows(const std::vector<WorkflowEntry>& entries) {
  if (entries.empty()) return {};
  std::string out(prompts::kWorkflowsHeading);
  for (const auto& e : entries) out += "\n" + e.goal + ": " + e.workflow;
  return out;
}

std::string render_notes(const SemanticMemory& memory) {
  if (memory.reflections.empty()) return {};
  std::string out(prompts::kNotesHeading);
  for (const auto& r : memory.reflections) out += "\n- " + r;
  return out;
}

std::string_view to_string(StrategyKind k) noexcept { return kStrategyNames[static_cast<std::size_t>(k)]; }

std::optional<StrategyKind> strategy_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == s) return static_cast<StrategyKind>(i);
  }
  return std::nullopt;
}

std::unique_ptr<MemoryStrategy> make_strategy(StrategyKind kind, OfflineOptions options) {
  switch (kind) {
    case StrategyKind::React: return std::make_unique<ReactStrategy>();
    case StrategyKind::Reflexion: return std::make_unique<ReflexionStrategy>(options);
    case StrategyKind::Awm: return std::make_unique<AwmStrategy>(options);
    case StrategyKind::AwmPlusPlus:
    case StrategyKind::Echo: return std::make_unique<BufferStrategy>(kind, options);
  }
  throw ConfigError("unknown strategy");
}

std::vector<WorkflowEntry> workflows_from_snapshot(const nlohmann::json& snapshot) {
  std::vector<WorkflowEntry> out;
  for (const char* key : {"entries", "workflows"}) {
    if (!snapshot.contains(key)) continue;
    for (const auto& e : snapshot.at(key)) {
      out.push_back({e.at("goal").get<std::string>(), e.at("workflow").get<std::string>()});
    }
  }
  return out;
}

}  // namespace echogrid
