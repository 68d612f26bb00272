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

#include <sstream>

#include "echogrid/agent.hpp"
#include "echogrid/episode.hpp"
#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/prompts.hpp"
#include "echogrid/rng.hpp"

using namespace echogrid;

namespace {

class SequencePolicy : public Policy {
 public:
  explicit SequencePolicy(std::vector<int> choices) : choices_(std::move(choices)) {}
  Decision decide(const PolicyContext& ctx) override {
    ++calls;
    const auto i = static_cast<std::size_t>(ctx.step_index);
    return Decision{"step " + std::to_string(i), i < choices_.size() ? choices_[i] : 0, 1};
  }
  int calls = 0;

 private:
  std::vector<int> choices_;
};

class ThrowingPolicy : public Policy {
 public:
  Decision decide(const PolicyContext& ctx) override {
    if (ctx.step_index == 2) throw PolicyError("no usable output", 2);
    return Decision{"", 0, 1};
  }
};

const Goal kGreyKey{Color::Grey, ObjectKind::Key};

GridWorld corridor() {
  return world_from_ascii({"##########", "#>......0#", "##########"}, {{Color::Grey, ObjectKind::Key}});
}

Trajectory random_trajectory(Rng& rng) {
  Trajectory t;
  t.goal = Goal{kAllColors[rng.below(6)], kAllKinds[rng.below(6)]};
  t.env_seed = rng.next();
  t.episode_index = static_cast<int>(rng.below(100));
  const auto n = rng.below(10);
  for (std::uint64_t i = 0; i < n; ++i) {
    StepRecord s;
    s.observation = "obs " + std::to_string(rng.next()) + " \"quoted\" \n newline";
    s.thought = rng.below(2) ? "" : "thought é " + std::to_string(rng.below(1000));
    s.action = static_cast<int>(rng.below(6));
    s.valid = rng.below(2) == 1;
    s.lm_calls = 1 + static_cast<int>(rng.below(2));
    t.steps.push_back(s);
  }
  t.success = rng.below(2) == 1 && !t.steps.empty();
  if (t.success) {
    t.reward = 1;
    t.steps.back().reward = 1;
  }
  if (rng.below(5) == 0) {
    t.diagnostic = "step 3: out-of-range action 9";
    t.aborted_lm_calls = 2;
  }
  return t;
}

}  // namespace

TEST_CASE("always turning left fails after the full horizon") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GridWorld w = generate(seed);
    SequencePolicy p({});
    const auto& o = w.objects()[0];
    const Trajectory t = run_episode(w, Goal{o.color, o.kind}, p, 64);
    CHECK_FALSE(t.success);
    CHECK(t.reward == 0);
    CHECK(t.steps.size() == 64);
    for (const auto& s : t.steps) CHECK(s.reward == 0);
  }
}

TEST_CASE("success terminates the episode immediately") {
  GridWorld w = corridor();
  SequencePolicy p({0, 1, 2, 2, 2, 2, 2, 2, 3, 0, 0});
  const Trajectory t = run_episode(w, kGreyKey, p, 64);
  CHECK(t.success);
  CHECK(t.reward == 1);
  CHECK(t.steps.size() == 9);
  CHECK(p.calls == 9);
  CHECK(t.steps.back().reward == 1);
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) CHECK(t.steps[i].reward == 0);
}

TEST_CASE("invalid choices are recorded as no-op steps") {
  GridWorld w = corridor();
  SequencePolicy p({3, 4, 5});
  const Trajectory t = run_episode(w, kGreyKey, p, 3);
  REQUIRE(t.steps.size() == 3);
  for (const auto& s : t.steps) CHECK_FALSE(s.valid);
  CHECK(w.agent().position == Pos{1, 1});
}

TEST_CASE("policy failures and out-of-range choices abort with a diagnostic") {
  GridWorld w = corridor();
  ThrowingPolicy p;
  const Trajectory t = run_episode(w, kGreyKey, p, 64);
  CHECK_FALSE(t.success);
  CHECK(t.steps.size() == 2);
  CHECK(t.diagnostic.find("no usable output") != std::string::npos);
  CHECK(t.aborted_lm_calls == 2);

  w.reset();
  SequencePolicy bad({2, 9});
  const Trajectory u = run_episode(w, kGreyKey, bad, 64);
  CHECK(u.steps.size() == 1);
  CHECK(u.diagnostic.find("out-of-range") != std::string::npos);
}

TEST_CASE("episode preconditions") {
  GridWorld w = corridor();
  SequencePolicy p({});
  CHECK_THROWS_AS(run_episode(w, kGreyKey, p, 0), ConfigError);
  CHECK_THROWS_AS(run_episode(w, Goal{Color::Red, ObjectKind::Box}, p, 5), ConfigError);
}

TEST_CASE("oracle policy solves every generated goal in the BFS length") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GridWorld w = generate(seed);
    const GridWorld fresh = w;
    for (const auto& o : fresh.objects()) {
      const Goal g{o.color, o.kind};
      w.reset();
      const Plan plan = bfs_plan(w, g);
      OraclePolicy p(w);
      const Trajectory t = run_episode(w, g, p, 64);
      CHECK(t.success);
      CHECK(t.steps.size() == plan.actions.size());
      w.reset();
      OraclePolicy again(w);
      CHECK(run_episode(w, g, again, 64) == t);
    }
  }
}

TEST_CASE("ReAct policy: message layout, reminder retry and aborts") {
  SUBCASE("first turn carries the goal and the menus") {
    GridWorld w = corridor();
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{R"({"thought": "go", "choice": 2})"}, false);
    ReActPolicy p(backend, "");
    run_episode(w, kGreyKey, p, 2);
    const auto reqs = backend->requests();
    REQUIRE(reqs.size() == 2);
    CHECK(reqs[0].system_prompt == prompts::agent_system_prompt(2, ""));
    REQUIRE(reqs[0].messages.size() == 1);
    CHECK(reqs[0].messages[0].content ==
          "Goal: Pick up the grey key.\n\nStep 1 of 2.\nObservation: You see nothing of note.\n"
          "valid_actions={0: \"turn left\", 1: \"turn right\", 2: \"go forward\"}, invalid_actions={3: \"pick up\", "
          "4: \"put down\", 5: \"toggle door\"}");
    REQUIRE(reqs[1].messages.size() == 3);
    CHECK(reqs[1].messages[1].role == "assistant");
    CHECK(reqs[1].messages[2].content.rfind("Step 2 of 2.\n", 0) == 0);
  }
  SUBCASE("one reminder after an unparseable reply") {
    GridWorld w = corridor();
    auto backend = std::make_shared<ScriptedBackend>(
        std::vector<std::string>{"I will go forward", R"({"thought": "ok", "choice": 2})"}, true);
    ReActPolicy p(backend, "");
    const Trajectory t = run_episode(w, kGreyKey, p, 1);
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].lm_calls == 2);
    CHECK(t.steps[0].action == 2);
    const auto reqs = backend->requests();
    CHECK(reqs[1].messages.back().content == prompts::kChoiceReminder);
  }
  SUBCASE("two failures abort the episode") {
    GridWorld w = corridor();
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"nope", R"({"choice": 17})"}, true);
    ReActPolicy p(backend, "");
    const Trajectory t = run_episode(w, kGreyKey, p, 5);
    CHECK(t.steps.empty());
    CHECK(t.aborted_lm_calls == 2);
    CHECK_FALSE(t.diagnostic.empty());
    CHECK(backend->call_count() == 2);
  }
  SUBCASE("backend failure aborts the episode") {
    GridWorld w = corridor();
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{}, true);
    ReActPolicy p(backend, "");
    const Trajectory t = run_episode(w, kGreyKey, p, 5);
    CHECK(t.steps.empty());
    CHECK(t.diagnostic.find("backend failure") != std::string::npos);
    CHECK(t.aborted_lm_calls == 1);
  }
  SUBCASE("memory is appended to the system prompt") {
    GridWorld w = corridor();
    auto backend = make_turn_left_backend();
    ReActPolicy p(backend, "Known workflows:\npick up the grey key: Step 1: go forward 7 times.");
    run_episode(w, kGreyKey, p, 1);
    const auto sys = backend->requests()[0].system_prompt;
    CHECK(sys == prompts::agent_system_prompt(1, "") + "\n\nKnown workflows:\npick up the grey key: Step 1: go forward 7 times.");
  }
}

TEST_CASE("trajectory JSONL round-trips losslessly") {
  Rng rng(99);
  std::vector<Trajectory> corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back(random_trajectory(rng));
  std::ostringstream a;
  write_jsonl(a, corpus);
  std::istringstream in(a.str());
  const auto back = read_jsonl(in);
  CHECK(back == corpus);
  std::ostringstream b;
  write_jsonl(b, back);
  CHECK(a.str() == b.str());

  Trajectory empty;
  empty.goal = kGreyKey;
  CHECK(deserialize(serialize(empty)) == empty);
  CHECK(serialize(empty).find("\"schema_version\":1") != std::string::npos);
}

TEST_CASE("malformed JSONL is reported with line numbers") {
  Trajectory t;
  t.goal = kGreyKey;
  std::istringstream in(serialize(t) + "\n\n{\"schema_version\": 1}\n");
  try {
    read_jsonl(in);
    FAIL("expected a FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
  }
  std::istringstream garbage("not json\n");
  CHECK_THROWS_AS(read_jsonl(garbage), FormatError);
}

TEST_CASE("transcript rendering") {
  GridWorld w = corridor();
  SequencePolicy p({2, 3});
  const Trajectory t = run_episode(w, kGreyKey, p, 2);
  const std::string text = render_transcript(t, 2);
  CHECK(text.rfind("Goal: Pick up the grey key\n", 0) == 0);
  CHECK(text.find("Action: 2 (go forward)") != std::string::npos);
  CHECK(text.find("Action: 3 (pick up) [invalid, no effect]") != std::string::npos);
  CHECK(text.find("Outcome: failure, the goal was not achieved within 2 steps.") != std::string::npos);
}
