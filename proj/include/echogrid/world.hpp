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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace echogrid {

enum class CellType : std::uint8_t { Floor, Wall, Door };
enum class Direction : std::uint8_t { North, East, South, West };
enum class ObjectKind : std::uint8_t { Key, Ball, Box, Star, Hexagon, Square };
enum class Color : std::uint8_t { Red, Green, Blue, Purple, Yellow, Grey };
enum class DoorState : std::uint8_t { Open, Closed };

// Global action indices. Fixed for every step of every episode; the per-step
// menus shown to the agent refer to these numbers.
enum class Action : std::uint8_t {
  TurnLeft = 0,
  TurnRight = 1,
  GoForward = 2,
  PickUp = 3,
  PutDown = 4,
  ToggleDoor = 5,
};
inline constexpr int kActionCount = 6;

inline constexpr std::array<ObjectKind, 6> kAllKinds = {
    ObjectKind::Key, ObjectKind::Ball, ObjectKind::Box,
    ObjectKind::Star, ObjectKind::Hexagon, ObjectKind::Square};
inline constexpr std::array<Color, 6> kAllColors = {
    Color::Red, Color::Green, Color::Blue,
    Color::Purple, Color::Yellow, Color::Grey};

std::string_view to_string(Color c) noexcept;
std::string_view to_string(ObjectKind k) noexcept;
std::string_view to_string(Direction d) noexcept;
std::string_view to_string(DoorState s) noexcept;
std::string_view action_name(Action a) noexcept;

std::optional<Color> color_from_string(std::string_view s) noexcept;
std::optional<ObjectKind> kind_from_string(std::string_view s) noexcept;
std::optional<Direction> direction_from_string(std::string_view s) noexcept;
std::optional<Action> action_from_index(int index) noexcept;
std::optional<Action> action_from_name(std::string_view name) noexcept;

Direction turn_left(Direction d) noexcept;
Direction turn_right(Direction d) noexcept;

struct Pos {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Pos&, const Pos&) = default;
};

Pos offset(Pos p, Direction d, int distance = 1) noexcept;

struct WorldObject {
  ObjectKind kind = ObjectKind::Key;
  Color color = Color::Red;
  std::optional<Pos> position;  // empty while carried
  Pos home_position;
  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

struct Door {
  Color color = Color::Red;
  Pos position;
  DoorState state = DoorState::Closed;
  DoorState home_state = DoorState::Closed;
  friend bool operator==(const Door&, const Door&) = default;
};

struct AgentPose {
  Pos position;
  Direction facing = Direction::North;
  std::optional<std::size_t> carrying;  // index into GridWorld::objects()
  Pos home_position;
  Direction home_facing = Direction::North;
  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

// Inclusive interior bounds of one room.
struct Room {
  Pos min;
  Pos max;
  bool contains(Pos p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  int area() const noexcept { return (max.x - min.x + 1) * (max.y - min.y + 1); }
  friend bool operator==(const Room&, const Room&) = default;
};

// A pick-up goal.
struct Goal {
  Color color = Color::Red;
  ObjectKind kind = ObjectKind::Key;
  friend auto operator<=>(const Goal&, const Goal&) = default;
};

struct GenConfig {
  int width = 13;
  int height = 13;
  int rooms = 4;
  int objects = 4;
  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

// Throws ConfigError when the layout cannot host one object per room.
void validate(const GenConfig& config);

struct StepEffect {
  Action action = Action::TurnLeft;
  bool no_op = false;
};

// Partition of the six actions for the current state, keyed by global index.
struct ActionMenus {
  std::map<int, std::string> valid;
  std::map<int, std::string> invalid;
  friend bool operator==(const ActionMenus&, const ActionMenus&) = default;
};

class GridWorld {
 public:
  GridWorld(int width, int height, std::vector<CellType> cells,
            std::vector<Door> doors, std::vector<WorldObject> objects,
            AgentPose agent, std::uint64_t seed = 0,
            std::vector<Room> rooms = {}, GenConfig config = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const GenConfig& config() const noexcept { return config_; }
  const std::vector<Room>& rooms() const noexcept { return rooms_; }
  const std::vector<Door>& doors() const noexcept { return doors_; }
  const std::vector<WorldObject>& objects() const noexcept { return objects_; }
  const AgentPose& agent() const noexcept { return agent_; }

  bool in_bounds(Pos p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  // Out-of-bounds cells read as walls.
  CellType cell(Pos p) const noexcept;
  std::optional<std::size_t> object_at(Pos p) const noexcept;
  std::optional<std::size_t> door_at(Pos p) const noexcept;
  // Walls and closed doors block movement and sight.
  bool is_opaque(Pos p) const noexcept;
  // Floor or open door with no object on it.
  bool is_passable(Pos p) const noexcept;
  Pos front() const noexcept { return offset(agent_.position, agent_.facing); }

  bool is_valid(Action a) const noexcept;
  ActionMenus action_menus() const;

  // Invalid actions leave the world untouched and report no_op.
  StepEffect step(Action a) noexcept;
  // Restores the generation-time state. Idempotent.
  void reset() noexcept;

  std::optional<std::size_t> find_object(const Goal& goal) const noexcept;
  // Throws ConfigError when the goal names an object absent from the world.
  bool goal_satisfied(const Goal& goal) const;

  friend bool operator==(const GridWorld&, const GridWorld&) = default;

 private:
  int width_;
  int height_;
  std::vector<CellType> cells_;
  std::vector<Door> doors_;
  std::vector<WorldObject> objects_;
  AgentPose agent_;
  std::uint64_t seed_;
  std::vector<Room> rooms_;
  GenConfig config_;
};

// Builds a 2x2-room world fully determined by (seed, config).
GridWorld generate(std::uint64_t seed, const GenConfig& config = {});

nlohmann::json world_to_json(const GridWorld& world);
// Throws FormatError on malformed or inconsistent snapshots.
GridWorld world_from_json(const nlohmann::json& doc);

// Human-readable map; never shown to the agent.
std::string render_ascii(const GridWorld& world);

struct ObjectSpec {
  Color color;
  ObjectKind kind;
};

// Hand-built worlds for tests and debugging. Legend: '#' wall, '.' floor,
// 'D' closed door, 'd' open door, '^' '>' 'v' '<' agent on floor, '0'-'9'
// object index into `objects`. Door colors are taken from `door_colors` in
// row-major order of appearance.
GridWorld world_from_ascii(const std::vector<std::string>& rows,
                           const std::vector<ObjectSpec>& objects,
                           const std::vector<Color>& door_colors = {});

}  // namespace echogrid
