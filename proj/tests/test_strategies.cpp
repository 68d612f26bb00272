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

#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/prompts.hpp"
#include "echogrid/rng.hpp"
#include "echogrid/strategies.hpp"
#include "echogrid/textview.hpp"

using namespace echogrid;

namespace {

Trajectory grey_key_failure() {
  Trajectory t;
  t.goal = Goal{Color::Grey, ObjectKind::Key};
  for (int i = 0; i < 3; ++i) {
    StepRecord s;
    s.observation = i == 1 ? "You see a grey star two steps ahead." : "You see nothing of note.";
    s.thought = "searching";
    s.action = 2;
    t.steps.push_back(s);
  }
  return t;
}

std::shared_ptr<ScriptedBackend> script(std::vector<std::string> replies) {
  return std::make_shared<ScriptedBackend>(std::move(replies), true);
}

std::string workflow_reply(const std::string& goal, const std::string& wf) {
  return nlohmann::json{{"goal", goal}, {"workflow", wf}}.dump();
}

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(ECHOGRID_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("update rule examples") {
  ReplayBuffer b;
  CHECK(b.update("g", "abcdef") == UpdateOutcome::Inserted);
  CHECK(b.update("g", "abc") == UpdateOutcome::Replaced);
  CHECK(*b.find("g") == "abc");
  CHECK(b.update("g", "abz") == UpdateOutcome::Kept);
  CHECK(*b.find("g") == "abc");
  CHECK(b.update("h", "xyz") == UpdateOutcome::Inserted);
  CHECK(b.update("h", "") == UpdateOutcome::Rejected);
  CHECK(b.update("Pick up grey key.", "w") == UpdateOutcome::Inserted);
  CHECK(b.find("pick up the grey key") != nullptr);
  CHECK(b.size() == 3);
  CHECK(b.entries()[0].goal == "g");
}

TEST_CASE("update rule agrees with a reference model on random streams") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    ReplayBuffer b;
    std::map<std::string, std::string> model;
    std::vector<std::string> order;
    for (int i = 0; i < 30; ++i) {
      const std::string goal = "pick up the " + std::string(to_string(kAllColors[rng.below(3)])) + " key";
      const std::string wf(rng.below(12), 'a' + static_cast<char>(rng.below(3)));
      const std::size_t before = model.count(goal) ? model[goal].size() : 0;
      b.update(goal, wf);
      if (!wf.empty()) {
        if (!model.count(goal)) {
          model[goal] = wf;
          order.push_back(goal);
        } else if (wf.size() < model[goal].size()) {
          model[goal] = wf;
        }
      }
      if (before) CHECK(b.find(goal)->size() <= before);
    }
    REQUIRE(b.size() == order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      CHECK(b.entries()[k].goal == order[k]);
      CHECK(b.entries()[k].workflow == model[order[k]]);
      CHECK_FALSE(b.entries()[k].workflow.empty());
    }
  }
}

TEST_CASE("ECHO relabels a failed trajectory into the star workflow") {
  const std::string wf =
      "Step 1: Navigate north from the starting location. Step 2: Move towards the grey star located to the "
      "northeast. Step 3: Pick up the grey star.";
  auto backend = script({R"({"0": "Agent spawned in the west room", "1": "Agent saw the grey star"})",
                         R"({"possible_goals": ["Pick up the grey star"]})", workflow_reply("Pick up the grey star", wf)});
  ReplayBuffer buffer;
  const auto report = echo_after_episode(*backend, grey_key_failure(), buffer);
  CHECK(report.lm_calls == 3);
  CHECK(backend->call_count() == 3);
  REQUIRE(buffer.size() == 1);
  CHECK(buffer.entries()[0].goal == "pick up the grey star");
  CHECK(buffer.entries()[0].workflow == wf);

  const auto reqs = backend->requests();
  CHECK(reqs[0].role == CallRole::Summarize);
  CHECK(reqs[0].system_prompt == prompts::kSummarize);
  CHECK(reqs[0].messages[0].content == render_transcript(grey_key_failure(), kDefaultHorizon));
  CHECK(reqs[1].system_prompt == prompts::kIdentifyGoals);
  CHECK(reqs[1].messages[0].content ==
        "Trajectory summary:\n0: Agent spawned in the west room\n1: Agent saw the grey star\n");
  CHECK(reqs[2].system_prompt == prompts::kInferTrajectory);
  CHECK(reqs[2].messages[0].content ==
        "Goal: Pick up the grey star\n\nTrajectory summary:\n0: Agent spawned in the west room\n1: Agent saw the grey "
        "star\n");
  for (const auto& r : reqs) {
    CHECK(r.params.temperature == 0.0);
    CHECK(r.params.max_new_tokens == 4000);
  }
}

TEST_CASE("ECHO abstention and stage failures leave the buffer alone") {
  ReplayBuffer buffer;
  buffer.update("pick up the red ball", "keep me");
  const ReplayBuffer before = buffer;
  SUBCASE("no goals proposed: exactly two calls") {
    auto b = script({R"({"0": "x"})", R"({"possible_goals": []})"});
    CHECK(echo_after_episode(*b, grey_key_failure(), buffer).lm_calls == 2);
  }
  SUBCASE("unparseable summary stops after one call") {
    auto b = script({"I cannot summarize"});
    const auto r = echo_after_episode(*b, grey_key_failure(), buffer);
    CHECK(r.lm_calls == 1);
    CHECK(r.diagnostics.size() == 1);
  }
  SUBCASE("unparseable goals") {
    auto b = script({R"({"0": "x"})", R"({"goals": ["Pick up the red ball"]})"});
    CHECK(echo_after_episode(*b, grey_key_failure(), buffer).lm_calls == 2);
  }
  SUBCASE("unparseable or empty workflow") {
    auto b = script({R"({"0": "x"})", R"({"possible_goals": ["Pick up the red ball"]})", workflow_reply("", "")});
    const auto r = echo_after_episode(*b, grey_key_failure(), buffer);
    CHECK(r.lm_calls == 3);
    CHECK(r.outcomes == std::vector<UpdateOutcome>{UpdateOutcome::Rejected});
  }
  SUBCASE("backend failure") {
    auto b = script({});
    const auto r = echo_after_episode(*b, grey_key_failure(), buffer);
    CHECK(r.lm_calls == 1);
    CHECK_FALSE(r.diagnostics.empty());
  }
  CHECK(buffer == before);
}

TEST_CASE("ECHO collision replaces the longer workflow and inserts the new goal") {
  ReplayBuffer buffer;
  buffer.update("pick up the red ball", "a long stored workflow for the ball");
  auto b = script({R"({"0": "x"})", R"({"possible_goals": ["Pick up the red ball", "pick up a blue box."]})",
                   workflow_reply("Pick up the red ball", "short"), workflow_reply("Pick up the blue box", "box wf")});

  // Expected state by applying the rule directly.
  ReplayBuffer expected = buffer;
  expected.update("pick up the red ball", "short");
  expected.update("pick up the blue box", "box wf");

  const auto r = echo_after_episode(*b, grey_key_failure(), buffer);
  CHECK(r.lm_calls == 4);
  CHECK(r.outcomes == std::vector<UpdateOutcome>{UpdateOutcome::Replaced, UpdateOutcome::Inserted});
  CHECK(buffer == expected);
}

TEST_CASE("ECHO dedupes goals and caps them") {
  std::vector<std::string> goals;
  for (auto c : kAllColors) {
    goals.push_back("Pick up the " + std::string(to_string(c)) + " key");
    goals.push_back("pick up " + std::string(to_string(c)) + " key.");
  }
  for (auto k : {"ball", "box", "star"}) goals.push_back(std::string("Pick up the red ") + k);
  std::vector<std::string> replies = {R"({"0": "x"})", nlohmann::json{{"possible_goals", goals}}.dump()};
  for (int i = 0; i < 8; ++i) replies.push_back(workflow_reply("g", "wf" + std::to_string(i)));
  auto b = script(replies);
  ReplayBuffer buffer;
  const auto r = echo_after_episode(*b, grey_key_failure(), buffer);
  CHECK(r.goals.size() == 8);
  CHECK(r.lm_calls == 10);
  CHECK(buffer.size() == 8);
  CHECK(buffer.entries()[1].goal == "pick up the green key");
}

TEST_CASE("Reflexion appends one note per episode") {
  SemanticMemory memory;
  auto b = script({R"({"reflection": "I need to ensure that I correctly execute the 'pick up' action."})",
                   R"({"reflection": "second"})", "malformed"});
  CHECK(reflexion_after_episode(*b, grey_key_failure(), memory).lm_calls == 1);
  CHECK(reflexion_after_episode(*b, grey_key_failure(), memory).lm_calls == 1);
  CHECK(memory.reflections.size() == 2);
  CHECK(reflexion_after_episode(*b, grey_key_failure(), memory).lm_calls == 1);
  CHECK(memory.reflections.size() == 2);
  CHECK(b->requests()[0].system_prompt == prompts::kReflexion);
  CHECK(render_notes(memory) ==
        "Notes from previous episodes:\n- I need to ensure that I correctly execute the 'pick up' action.\n- second");
}

TEST_CASE("AWM appends successful workflows only") {
  WorkflowLog log;
  auto b = script({"{\n  \"goal\": \"Pick up grey key.\",\n  \"workflow\": \"\"\n}", workflow_reply("Pick up the grey key", "wf"),
                   workflow_reply("Pick up the grey key", "wf"), "garbage"});
  CHECK(awm_after_episode(*b, grey_key_failure(), log).lm_calls == 1);
  CHECK(log.empty());
  awm_after_episode(*b, grey_key_failure(), log);
  awm_after_episode(*b, grey_key_failure(), log);
  CHECK(log.size() == 2);
  CHECK(log[0] == log[1]);
  CHECK(awm_after_episode(*b, grey_key_failure(), log).lm_calls == 1);
  CHECK(log.size() == 2);
  CHECK(b->requests()[0].system_prompt == prompts::kAwm);
}

TEST_CASE("AWM++ keys by goal and keeps the shorter workflow") {
  const std::vector<std::string> replies = {workflow_reply("Pick up the grey key", "a longer workflow"),
                                            workflow_reply("Pick up grey key.", "short"),
                                            workflow_reply("Pick up the grey key", "a longer workflow"),
                                            workflow_reply("Pick up the grey key", "")};
  ReplayBuffer buffer;
  WorkflowLog log;
  auto b1 = script(replies);
  auto b2 = script(replies);
  std::vector<UpdateOutcome> outcomes;
  for (int i = 0; i < 4; ++i) {
    const auto r = awmpp_after_episode(*b1, grey_key_failure(), buffer);
    CHECK(r.lm_calls == 1);
    outcomes.insert(outcomes.end(), r.outcomes.begin(), r.outcomes.end());
    awm_after_episode(*b2, grey_key_failure(), log);
  }
  CHECK(outcomes == std::vector<UpdateOutcome>{UpdateOutcome::Inserted, UpdateOutcome::Replaced, UpdateOutcome::Kept});
  REQUIRE(buffer.size() == 1);
  CHECK(buffer.entries()[0].workflow == "short");
  CHECK(log.size() == 3);
}

TEST_CASE("memory rendering") {
  CHECK(render_workflows({}).empty());
  CHECK(render_notes({}).empty());
  CHECK(render_workflows({{"pick up the grey star", "Step 1: pick up the grey star."}}) ==
        "Known workflows:\npick up the grey star: Step 1: pick up the grey star.");
  ReplayBuffer b;
  b.update("Pick up the grey star", "Step 1: turn right. Step 2: go forward 2 times. Step 3: pick up the grey star.");
  b.update("pick up red ball",
           "Step 1: toggle the blue door. Step 2: go forward 4 times. Step 3: turn left. Step 4: pick up the red ball.");
  b.update("Pick up the yellow key.", "Step 1: pick up the yellow key.");
  CHECK(render_workflows(b.entries()) == read_golden("memory_render.txt"));
  CHECK(make_strategy(StrategyKind::React)->render_memory().empty());
}

TEST_CASE("abstaining backends degrade every strategy to ReAct") {
  for (auto kind : {StrategyKind::Reflexion, StrategyKind::Awm, StrategyKind::AwmPlusPlus, StrategyKind::Echo}) {
    auto strategy = make_strategy(kind);
    auto b = make_turn_left_backend();
    ScriptedBackend failing({}, true);
    for (int i = 0; i < 3; ++i) {
      if (kind != StrategyKind::Reflexion) strategy->after_episode(*b, grey_key_failure());
      strategy->after_episode(failing, grey_key_failure());
    }
    CHECK(strategy->render_memory().empty());
    CHECK(strategy->workflows().empty());
  }
}

TEST_CASE("strategies are isolated from run interleaving") {
  const GridWorld w = generate(3);
  std::vector<Trajectory> stream;
  for (const auto& o : w.objects()) {
    GridWorld copy = w;
    OraclePolicy p(copy);
    stream.push_back(run_episode(copy, Goal{o.color, o.kind}, p, 64));
  }
  auto s1 = make_strategy(StrategyKind::Echo), s2 = make_strategy(StrategyKind::Echo);
  auto b1 = scripted_echo_backend(w), b2 = scripted_echo_backend(w);
  auto other = make_strategy(StrategyKind::Awm);
  auto b3 = scripted_echo_backend(w);
  for (const auto& t : stream) s1->after_episode(*b1, t);
  for (const auto& t : stream) {
    other->after_episode(*b3, t);
    s2->after_episode(*b2, t);
  }
  CHECK(s1->snapshot() == s2->snapshot());
  CHECK_FALSE(s1->workflows().empty());
}

TEST_CASE("snapshots expose their workflows") {
  auto s = make_strategy(StrategyKind::AwmPlusPlus);
  auto b = script({workflow_reply("Pick up the grey key", "wf")});
  s->after_episode(*b, grey_key_failure());
  const auto snap = s->snapshot();
  CHECK(snap.at("strategy") == "awmpp");
  CHECK(workflows_from_snapshot(snap) == std::vector<WorkflowEntry>{{"pick up the grey key", "wf"}});
  CHECK(workflows_from_snapshot(make_strategy(StrategyKind::React)->snapshot()).empty());
  CHECK(strategy_from_string("echo") == StrategyKind::Echo);
  CHECK_FALSE(strategy_from_string("none").has_value());
}
