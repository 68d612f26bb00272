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

#include <algorithm>

#include "echogrid/agent.hpp"
#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/rng.hpp"
#include "echogrid/strategies.hpp"
#include "echogrid/textview.hpp"

using namespace echogrid;

namespace {

const Goal kGreyKey{Color::Grey, ObjectKind::Key};

// Shortest successful sequence by iterative deepening over every action
// sequence, replayed from the start state. Returns -1 when none exists up
// to `limit`.
int brute_force_length(const GridWorld& start, const Goal& goal, int limit) {
  std::vector<int> seq;
  for (int len = 1; len <= limit; ++len) {
    seq.assign(static_cast<std::size_t>(len), 0);
    while (true) {
      GridWorld w = start;
      bool hit = false;
      for (int a : seq) {
        w.step(static_cast<Action>(a));
        if (w.goal_satisfied(goal)) {
          hit = true;
          break;
        }
      }
      if (hit) return len;
      std::size_t k = 0;
      while (k < seq.size() && ++seq[k] == kActionCount) seq[k++] = 0;
      if (k == seq.size()) break;
    }
  }
  return -1;
}

// Random 4x3-interior room with a few walls or doors.
GridWorld tiny_world(Rng& rng) {
  while (true) {
    std::vector<std::string> rows = {"######", "#....#", "#....#", "#....#", "######"};
    const int blocks = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < blocks; ++i) {
      rows[1 + rng.below(3)][1 + rng.below(4)] = rng.below(2) ? '#' : 'D';
    }
    std::vector<std::pair<int, int>> floor;
    for (int y = 1; y <= 3; ++y) {
      for (int x = 1; x <= 4; ++x) {
        if (rows[y][x] == '.') floor.push_back({x, y});
      }
    }
    if (floor.size() < 2) continue;
    const auto a = floor[rng.below(floor.size())];
    auto o = a;
    while (o == a) o = floor[rng.below(floor.size())];
    rows[a.second][a.first] = "^>v<"[rng.below(4)];
    rows[o.second][o.first] = '0';
    std::vector<Color> door_colors;
    for (const auto& r : rows) {
      for (char ch : r) {
        if (ch == 'D') door_colors.push_back(kAllColors[door_colors.size() % kAllColors.size()]);
      }
    }
    return world_from_ascii(rows, {{Color::Grey, ObjectKind::Key}}, door_colors);
  }
}

}  // namespace

TEST_CASE("adjacent object: the plan is a single pick up") {
  const GridWorld w = world_from_ascii({"####", "#>0#", "####"}, {{Color::Grey, ObjectKind::Key}});
  const Plan p = bfs_plan(w, kGreyKey);
  CHECK(p.feasible);
  CHECK(p.actions == std::vector<Action>{Action::PickUp});
}

TEST_CASE("object behind one closed door") {
  const GridWorld w = world_from_ascii({"#######", "#>.D.0#", "#######"}, {{Color::Grey, ObjectKind::Key}}, {Color::Red});
  const Plan p = bfs_plan(w, kGreyKey);
  REQUIRE(p.feasible);
  CHECK(std::count(p.actions.begin(), p.actions.end(), Action::ToggleDoor) == 1);
  CHECK(static_cast<int>(p.actions.size()) == brute_force_length(w, kGreyKey, 6));
  CHECK(format_workflow(w, p.actions) ==
        "Step 1: go forward. Step 2: toggle the red door. Step 3: go forward 2 times. Step 4: pick up the grey key.");
}

TEST_CASE("unreachable goals are reported infeasible") {
  const GridWorld w = world_from_ascii({"#######", "#>.#.0#", "#######"}, {{Color::Grey, ObjectKind::Key}});
  CHECK_FALSE(bfs_plan(w, kGreyKey).feasible);
  CHECK_THROWS_AS(bfs_plan(w, Goal{Color::Red, ObjectKind::Box}), ConfigError);
}

TEST_CASE("BFS is optimal against exhaustive search on tiny worlds") {
  Rng rng(31);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const GridWorld w = tiny_world(rng);
    const Plan p = bfs_plan(w, kGreyKey);
    const int brute = brute_force_length(w, kGreyKey, 6);
    CAPTURE(render_ascii(w));
    if (p.feasible && p.actions.size() <= 6) {
      CHECK(static_cast<int>(p.actions.size()) == brute);
      ++compared;
    } else {
      CHECK(brute == -1);
    }
  }
  CHECK(compared > 12);
}

TEST_CASE("every generated goal is solvable well within the horizon") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GridWorld w = generate(seed);
    for (const auto& o : w.objects()) {
      const Plan p = bfs_plan(w, Goal{o.color, o.kind});
      CAPTURE(seed);
      REQUIRE(p.feasible);
      CHECK(p.actions.size() <= 64);
      CHECK(p.actions.back() == Action::PickUp);
      GridWorld sim = w;
      for (std::size_t i = 0; i < p.actions.size(); ++i) {
        CHECK_FALSE(sim.step(p.actions[i]).no_op);
        CHECK(sim.goal_satisfied(Goal{o.color, o.kind}) == (i + 1 == p.actions.size()));
      }
    }
  }
}

TEST_CASE("workflows round-trip through the parser") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GridWorld w = generate(seed);
    for (const auto& o : w.objects()) {
      const Plan p = bfs_plan(w, Goal{o.color, o.kind});
      const std::string wf = format_workflow(w, p.actions);
      const auto back = parse_workflow_actions(wf);
      REQUIRE(back.has_value());
      CHECK(*back == p.actions);
      const auto refs = workflow_references(wf);
      CHECK(std::find(refs.begin(), refs.end(), std::string(to_string(o.color)) + " " + std::string(to_string(o.kind))) !=
            refs.end());
    }
  }
  CHECK_FALSE(parse_workflow_actions("Step 1: Navigate north from the starting location.").has_value());
  CHECK_FALSE(parse_workflow_actions("").has_value());
  CHECK(parse_workflow_actions("step 1: Turn Left 2 times. Step 2: pick up.") ==
        std::vector<Action>{Action::TurnLeft, Action::TurnLeft, Action::PickUp});
  CHECK(workflow_references("Step 2: Move towards the grey star located to the northeast.") ==
        std::vector<std::string>{"grey star"});
}

TEST_CASE("oracle backend replies always parse and solve the episode") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GridWorld w = generate(seed);
    const auto& o = w.objects()[seed % 4];
    const Goal g{o.color, o.kind};
    auto backend = make_oracle_backend(w);
    ReActPolicy p(backend, "");
    const Trajectory t = run_episode(w, g, p, 64);
    CHECK(t.success);
    w.reset();
    CHECK(t.steps.size() == bfs_plan(w, g).actions.size());
  }
}

TEST_CASE("scripted ECHO backend") {
  const GridWorld w = world_from_ascii({"#######", "#.....#", "#.1...#", "#.....#", "#.^..0#", "#######"},
                                       {{Color::Grey, ObjectKind::Key}, {Color::Grey, ObjectKind::Star}});
  auto backend = scripted_echo_backend(w);

  SUBCASE("summaries mention what was seen; goals follow; workflows are BFS plans") {
    Trajectory t;
    t.goal = kGreyKey;
    StepRecord s;
    s.observation = render(w).text;
    t.steps.push_back(s);
    REQUIRE(s.observation.find("grey star") != std::string::npos);
    ReplayBuffer buffer;
    const auto report = echo_after_episode(*backend, t, buffer);
    CHECK(report.diagnostics.empty());
    CHECK(std::find(report.goals.begin(), report.goals.end(), "pick up the grey star") != report.goals.end());
    const std::string* wf = buffer.find("pick up the grey star");
    REQUIRE(wf != nullptr);
    GridWorld sim = w;
    CHECK(parse_workflow_actions(*wf) == bfs_plan(sim, Goal{Color::Grey, ObjectKind::Star}).actions);
  }
  SUBCASE("seeing nothing portable abstains") {
    Trajectory t;
    t.goal = kGreyKey;
    StepRecord s;
    s.observation = "You see nothing of note.";
    t.steps.push_back(s);
    ReplayBuffer buffer;
    const auto report = echo_after_episode(*backend, t, buffer);
    CHECK(report.lm_calls == 2);
    CHECK(buffer.empty());
  }
  SUBCASE("agent follows a known workflow literally") {
    GridWorld world = w;
    const Plan plan = bfs_plan(world, Goal{Color::Grey, ObjectKind::Star});
    ReActPolicy p(backend, render_workflows({{"pick up the grey star", format_workflow(world, plan.actions)}}));
    const Trajectory t = run_episode(world, Goal{Color::Grey, ObjectKind::Star}, p, 64);
    CHECK(t.success);
    CHECK(t.steps.size() == plan.actions.size());
  }
}

TEST_CASE("every scripted output passes the parsers") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GridWorld w = generate(seed);
    const GridWorld fresh = w;
    for (const char* fixture : {"turn-left", "bfs-demo", "oracle"}) {
      auto backend = make_scripted_backend(fixture, w);
      for (auto kind : {StrategyKind::Reflexion, StrategyKind::Awm, StrategyKind::Echo}) {
        auto strategy = make_strategy(kind);
        for (const auto& o : fresh.objects()) {
          w.reset();
          ReActPolicy p(backend, strategy->render_memory());
          const Trajectory t = run_episode(w, Goal{o.color, o.kind}, p, 32);
          CHECK(t.diagnostic.empty());
          const auto report = strategy->after_episode(*backend, t);
          CHECK(report.diagnostics.empty());
        }
      }
    }
  }
  CHECK_THROWS_AS(make_scripted_backend("nope", generate(0)), ConfigError);
}

TEST_CASE("scripted backend bookkeeping") {
  ScriptedBackend strict({"a", "b"}, true);
  LMRequest r;
  CHECK(strict.complete(r) == "a");
  r.role = CallRole::Reflect;
  CHECK(strict.complete(r) == "b");
  CHECK_THROWS_AS(strict.complete(r), BackendError);
  CHECK(strict.call_count() == 3);
  CHECK(strict.call_count(CallRole::Reflect) == 2);
  ScriptedBackend lenient({"a"}, false);
  lenient.complete(r);
  CHECK(lenient.complete(r) == "a");
}
