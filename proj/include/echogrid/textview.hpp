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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echogrid/world.hpp"

namespace echogrid {

// Size of the forward-facing view: the agent sits at the middle of the back
// row and sees kViewDepth rows ahead (its own row included).
inline constexpr int kViewDepth = 7;
inline constexpr int kViewHalfWidth = 3;

enum class EntityType { Object, Door };

// Something the agent can see, in agent-relative coordinates: `ahead` grows
// along the facing direction, `right` is positive to the agent's right.
struct VisibleEntity {
  EntityType type = EntityType::Object;
  Color color = Color::Red;
  ObjectKind kind = ObjectKind::Key;  // objects only
  DoorState door_state = DoorState::Closed;  // doors only
  int ahead = 0;
  int right = 0;
  friend bool operator==(const VisibleEntity&, const VisibleEntity&) = default;
};

struct Observation {
  std::string text;
  std::vector<VisibleEntity> visible_entities;  // in rendered order
  std::optional<int> wall_distance;  // free cells before the wall ahead, when in view
  ActionMenus menus;
};

// World position of the agent-relative cell (ahead, right).
Pos egocentric_to_world(const AgentPose& agent, int ahead, int right) noexcept;

// Line of sight from the agent's cell center to the target cell center,
// blocked by any opaque cell whose interior the segment crosses. Segments
// passing exactly through a cell corner are not blocked by the two cells
// meeting there.
bool line_of_sight(const GridWorld& world, int ahead, int right);

Observation render(const GridWorld& world);

// "one" through "ten" as words, larger numbers as digits.
std::string number_word(int n);

// "valid_actions={2: \"go forward\", ...}, invalid_actions={...}"
std::string render_menus(const ActionMenus& menus);

// "Pick up the grey star"
std::string render_goal(const Goal& goal);

// Case-folds, collapses whitespace, strips trailing punctuation and enforces
// "pick up the ..." so LM variants of the same goal share one key.
std::string canonicalize_goal(std::string_view text);

// Accepts any variant canonicalize_goal understands.
std::optional<Goal> parse_goal(std::string_view text);

}  // namespace echogrid
