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

#include "echogrid/validity.hpp"

#include <cmath>

#include "echogrid/agent.hpp"
#include "echogrid/errors.hpp"
#include "echogrid/oracle.hpp"
#include "echogrid/rng.hpp"
#include "echogrid/textview.hpp"

namespace echogrid {

std::string_view to_string(FailureKind k) noexcept {
  return k == FailureKind::Infeasible ? "infeasible" : "agent deviation";
}

std::string ValidityResult::headline() const {
  if (nothing_to_validate) return "nothing to validate";
  const long pct = total == 0 ? 0 : std::lround(100.0 * successes / total);
  return std::to_string(successes) + "/" + std::to_string(total) + " (" + std::to_string(pct) + "%)";
}

FailureKind classify_failure(const GridWorld& world, const ValiditySample& sample, const Trajectory&) {
  const auto goal = parse_goal(sample.entry.goal);
  if (!goal || !world.find_object(*goal)) return FailureKind::Infeasible;
  const auto actions = parse_workflow_actions(sample.entry.workflow);
  if (!actions) return FailureKind::Infeasible;
  GridWorld sim = world;
  sim.reset();
  for (Action a : *actions) {
    sim.step(a);
    if (sim.goal_satisfied(*goal)) return FailureKind::AgentDeviation;
  }
  return FailureKind::Infeasible;
}

ValidityResult validity_analysis(const std::vector<ValidityPool>& pools, const BackendFactory& factory,
                                 int n_samples, std::uint64_t seed, int horizon, const FailureClassifier& classify) {
  if (n_samples < 1) throw UsageError("validity analysis needs at least one sample");
  std::vector<ValiditySample> pool;
  for (std::size_t e = 0; e < pools.size(); ++e) {
    for (const auto& entry : pools[e].workflows) pool.push_back({e, pools[e].world.seed(), entry});
  }
  ValidityResult result;
  if (pool.empty()) {
    result.nothing_to_validate = true;
    return result;
  }
  Rng rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);

  for (int i = 0; i < n_samples; ++i) {
    ValidityCase c;
    c.sample = pool[static_cast<std::size_t>(i) % pool.size()];
    GridWorld world = pools[c.sample.env].world;
    world.reset();
    const auto goal = parse_goal(c.sample.entry.goal);
    if (!goal || !world.find_object(*goal)) {
      c.failure = FailureKind::Infeasible;
      c.detail = "goal '" + c.sample.entry.goal + "' names no object in this world";
    } else {
      ReActPolicy policy(factory(world), render_workflows({c.sample.entry}));
      c.trajectory = run_episode(world, *goal, policy, horizon);
      c.success = c.trajectory.success;
      if (!c.success) {
        world.reset();
        c.failure = classify(world, c.sample, c.trajectory);
        c.detail = c.trajectory.diagnostic.empty() ? "goal not reached within " + std::to_string(horizon) + " steps"
                                                   : c.trajectory.diagnostic;
      }
    }
    result.successes += c.success ? 1 : 0;
    result.cases.push_back(std::move(c));
  }
  result.total = n_samples;
  return result;
}

}  // namespace echogrid
