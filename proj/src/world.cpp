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

#include "echogrid/world.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "echogrid/errors.hpp"
#include "echogrid/rng.hpp"

namespace echogrid {

namespace {

constexpr std::array<std::string_view, 6> kColorNames = {
    "red", "green", "blue", "purple", "yellow", "grey"};
constexpr std::array<std::string_view, 6> kKindNames = {
    "key", "ball", "box", "star", "hexagon", "square"};
constexpr std::array<std::string_view, 4> kDirectionNames = {
    "north", "east", "south", "west"};
constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "turn left", "turn right", "go forward", "pick up", "put down", "toggle door"};

// Generation stages. Each stage draws from its own stream.
enum Stage : std::uint64_t { kLayoutStage = 0, kDoorStage = 1, kObjectStage = 2, kAgentStage = 3 };

constexpr int kMaxSide = 64;

template <typename T, std::size_t N>
std::optional<T> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<T>(i);
  }
  return std::nullopt;
}

std::vector<Room> layout_rooms(int width, int height) {
  const int sx = width / 2;
  const int sy = height / 2;
  return {
      Room{{1, 1}, {sx - 1, sy - 1}},
      Room{{sx + 1, 1}, {width - 2, sy - 1}},
      Room{{1, sy + 1}, {sx - 1, height - 2}},
      Room{{sx + 1, sy + 1}, {width - 2, height - 2}},
  };
}

// Partial Fisher-Yates: the first `count` entries of a shuffled 0..n-1.
std::vector<std::size_t> draw_distinct(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

bool adjacent(Pos a, Pos b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1;
}

nlohmann::json pos_json(Pos p) { return nlohmann::json::array({p.x, p.y}); }

Pos pos_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw FormatError("position must be an [x, y] integer pair");
  }
  return Pos{j[0].get<int>(), j[1].get<int>()};
}

template <typename T>
T enum_from(std::optional<T> v, std::string_view what, const nlohmann::json& j) {
  if (!v) throw FormatError("unknown " + std::string(what) + ": " + j.dump());
  return *v;
}

std::optional<DoorState> door_state_from(std::string_view s) {
  if (s == "open") return DoorState::Open;
  if (s == "closed") return DoorState::Closed;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Color c) noexcept { return kColorNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(ObjectKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Direction d) noexcept { return kDirectionNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(DoorState s) noexcept { return s == DoorState::Open ? "open" : "closed"; }
std::string_view action_name(Action a) noexcept { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Color> color_from_string(std::string_view s) noexcept {
  if (s == "gray") return Color::Grey;
  return lookup<Color>(kColorNames, s);
}
std::optional<ObjectKind> kind_from_string(std::string_view s) noexcept {
  return lookup<ObjectKind>(kKindNames, s);
}
std::optional<Direction> direction_from_string(std::string_view s) noexcept {
  return lookup<Direction>(kDirectionNames, s);
}
std::optional<Action> action_from_index(int index) noexcept {
  if (index < 0 || index >= kActionCount) return std::nullopt;
  return static_cast<Action>(index);
}
std::optional<Action> action_from_name(std::string_view name) noexcept {
  return lookup<Action>(kActionNames, name);
}

Direction turn_left(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}
Direction turn_right(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

Pos offset(Pos p, Direction d, int distance) noexcept {
  switch (d) {
    case Direction::North: return {p.x, p.y - distance};
    case Direction::East: return {p.x + distance, p.y};
    case Direction::South: return {p.x, p.y + distance};
    case Direction::West: return {p.x - distance, p.y};
  }
  return p;
}

void validate(const GenConfig& config) {
  if (config.rooms != 4) {
    throw ConfigError("only the 2x2 layout (rooms = 4) is supported, got " +
                      std::to_string(config.rooms));
  }
  if (config.objects != config.rooms) {
    throw ConfigError("each room hosts exactly one object: objects must equal rooms (" +
                      std::to_string(config.rooms) + "), got " + std::to_string(config.objects));
  }
  if (config.width < 5 || config.height < 5 || config.width > kMaxSide ||
      config.height > kMaxSide) {
    throw ConfigError("grid sides must lie in [5, " + std::to_string(kMaxSide) + "]");
  }
  // Each room needs room for its object, the agent, and the cells in front
  // of its two doors, which are kept free so doorways never clog.
  for (const Room& r : layout_rooms(config.width, config.height)) {
    if (r.max.x < r.min.x || r.max.y < r.min.y || r.area() < 3) {
      throw ConfigError("room interiors of a " + std::to_string(config.width) + "x" +
                        std::to_string(config.height) +
                        " grid cannot host the required objects");
    }
  }
}

GridWorld::GridWorld(int width, int height, std::vector<CellType> cells,
                     std::vector<Door> doors, std::vector<WorldObject> objects,
                     AgentPose agent, std::uint64_t seed, std::vector<Room> rooms,
                     GenConfig config)
    : width_(width),
      height_(height),
      cells_(std::move(cells)),
      doors_(std::move(doors)),
      objects_(std::move(objects)),
      agent_(agent),
      seed_(seed),
      rooms_(std::move(rooms)),
      config_(config) {
  if (width_ <= 0 || height_ <= 0 || width_ > kMaxSide || height_ > kMaxSide) {
    throw ConfigError("grid dimensions out of range");
  }
  if (cells_.size() != static_cast<std::size_t>(width_) * height_) {
    throw ConfigError("cell count does not match grid dimensions");
  }
  for (const Door& d : doors_) {
    if (cell(d.position) != CellType::Door) throw ConfigError("door placed off a door slot");
  }
  const auto door_slots = std::count(cells_.begin(), cells_.end(), CellType::Door);
  if (static_cast<std::size_t>(door_slots) != doors_.size()) {
    throw ConfigError("every door slot needs exactly one door");
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto& o = objects_[i];
    const bool carried = agent_.carrying == i;
    if (o.position.has_value() == carried) {
      throw ConfigError("an object must be either on the grid or carried");
    }
    if (o.position && cell(*o.position) != CellType::Floor) {
      throw ConfigError("objects must rest on floor cells");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (objects_[j].kind == o.kind && objects_[j].color == o.color) {
        throw ConfigError("duplicate (color, kind) object");
      }
      if (o.position && objects_[j].position == o.position) {
        throw ConfigError("two objects share a cell");
      }
    }
  }
  if (agent_.carrying && *agent_.carrying >= objects_.size()) {
    throw ConfigError("carried object index out of range");
  }
  if (!in_bounds(agent_.position) || is_opaque(agent_.position) || object_at(agent_.position) ||
      cell(agent_.position) == CellType::Wall) {
    throw ConfigError("agent must stand on a free floor cell or open door");
  }
}

CellType GridWorld::cell(Pos p) const noexcept {
  if (!in_bounds(p)) return CellType::Wall;
  return cells_[static_cast<std::size_t>(p.y) * width_ + p.x];
}

std::optional<std::size_t> GridWorld::object_at(Pos p) const noexcept {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (objects_[i].position == p) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> GridWorld::door_at(Pos p) const noexcept {
  for (std::size_t i = 0; i < doors_.size(); ++i) {
    if (doors_[i].position == p) return i;
  }
  return std::nullopt;
}

bool GridWorld::is_opaque(Pos p) const noexcept {
  switch (cell(p)) {
    case CellType::Wall: return true;
    case CellType::Floor: return false;
    case CellType::Door: {
      const auto d = door_at(p);
      return !d || doors_[*d].state == DoorState::Closed;
    }
  }
  return true;
}

bool GridWorld::is_passable(Pos p) const noexcept {
  return in_bounds(p) && !is_opaque(p) && !object_at(p);
}

bool GridWorld::is_valid(Action a) const noexcept {
  const Pos f = front();
  switch (a) {
    case Action::TurnLeft:
    case Action::TurnRight: return true;
    case Action::GoForward: return is_passable(f);
    case Action::PickUp: return !agent_.carrying && object_at(f).has_value();
    case Action::PutDown:
      return agent_.carrying && cell(f) == CellType::Floor && !object_at(f);
    case Action::ToggleDoor: return door_at(f).has_value();
  }
  return false;
}

ActionMenus GridWorld::action_menus() const {
  ActionMenus menus;
  for (int i = 0; i < kActionCount; ++i) {
    const auto a = static_cast<Action>(i);
    auto& target = is_valid(a) ? menus.valid : menus.invalid;
    target.emplace(i, std::string(action_name(a)));
  }
  return menus;
}

StepEffect GridWorld::step(Action a) noexcept {
  if (!is_valid(a)) return {a, true};
  const Pos f = front();
  switch (a) {
    case Action::TurnLeft: agent_.facing = turn_left(agent_.facing); break;
    case Action::TurnRight: agent_.facing = turn_right(agent_.facing); break;
    case Action::GoForward: agent_.position = f; break;
    case Action::PickUp: {
      const std::size_t i = *object_at(f);
      objects_[i].position.reset();
      agent_.carrying = i;
      break;
    }
    case Action::PutDown:
      objects_[*agent_.carrying].position = f;
      agent_.carrying.reset();
      break;
    case Action::ToggleDoor: {
      Door& d = doors_[*door_at(f)];
      d.state = d.state == DoorState::Open ? DoorState::Closed : DoorState::Open;
      break;
    }
  }
  return {a, false};
}

void GridWorld::reset() noexcept {
  agent_.position = agent_.home_position;
  agent_.facing = agent_.home_facing;
  agent_.carrying.reset();
  for (auto& o : objects_) o.position = o.home_position;
  for (auto& d : doors_) d.state = d.home_state;
}

std::optional<std::size_t> GridWorld::find_object(const Goal& goal) const noexcept {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (objects_[i].color == goal.color && objects_[i].kind == goal.kind) return i;
  }
  return std::nullopt;
}

bool GridWorld::goal_satisfied(const Goal& goal) const {
  const auto target = find_object(goal);
  if (!target) {
    throw ConfigError("goal names an object absent from the world: " +
                      std::string(to_string(goal.color)) + " " +
                      std::string(to_string(goal.kind)));
  }
  return agent_.carrying == target;
}

GridWorld generate(std::uint64_t seed, const GenConfig& config) {
  validate(config);
  const int w = config.width;
  const int h = config.height;
  const int sx = w / 2;
  const int sy = h / 2;
  std::vector<Room> rooms = layout_rooms(w, h);

  std::vector<CellType> cells(static_cast<std::size_t>(w) * h, CellType::Wall);
  auto at = [&](Pos p) -> CellType& { return cells[static_cast<std::size_t>(p.y) * w + p.x]; };
  for (const Room& r : rooms) {
    for (int y = r.min.y; y <= r.max.y; ++y)
      for (int x = r.min.x; x <= r.max.x; ++x) at({x, y}) = CellType::Floor;
  }

  // One door per shared wall: NW|NE, NE|SE, SE|SW, SW|NW.
  Rng layout = Rng::stream(seed, kLayoutStage);
  std::array<Pos, 4> door_pos;
  door_pos[0] = {sx, 1 + static_cast<int>(layout.below(sy - 1))};
  door_pos[1] = {sx + 1 + static_cast<int>(layout.below(w - 2 - sx)), sy};
  door_pos[2] = {sx, sy + 1 + static_cast<int>(layout.below(h - 2 - sy))};
  door_pos[3] = {1 + static_cast<int>(layout.below(sx - 1)), sy};

  Rng door_rng = Rng::stream(seed, kDoorStage);
  const auto door_colors = draw_distinct(door_rng, kAllColors.size(), door_pos.size());
  std::vector<Door> doors;
  for (std::size_t i = 0; i < door_pos.size(); ++i) {
    at(door_pos[i]) = CellType::Door;
    doors.push_back(Door{kAllColors[door_colors[i]], door_pos[i], DoorState::Closed,
                         DoorState::Closed});
  }

  Rng object_rng = Rng::stream(seed, kObjectStage);
  const auto combos = draw_distinct(object_rng, kAllColors.size() * kAllKinds.size(),
                                    static_cast<std::size_t>(config.objects));
  std::vector<WorldObject> objects;
  for (std::size_t i = 0; i < combos.size(); ++i) {
    const Room& room = rooms[i];
    std::vector<Pos> eligible;
    for (int y = room.min.y; y <= room.max.y; ++y) {
      for (int x = room.min.x; x <= room.max.x; ++x) {
        const Pos p{x, y};
        const bool doorway = std::any_of(door_pos.begin(), door_pos.end(),
                                         [&](Pos d) { return adjacent(d, p); });
        if (!doorway) eligible.push_back(p);
      }
    }
    if (eligible.empty()) throw ConfigError("room interior cannot host its object");
    const Pos p = eligible[object_rng.below(eligible.size())];
    objects.push_back(WorldObject{kAllKinds[combos[i] / kAllColors.size()],
                                  kAllColors[combos[i] % kAllColors.size()], p, p});
  }

  Rng agent_rng = Rng::stream(seed, kAgentStage);
  const Room& start_room = rooms[agent_rng.below(rooms.size())];
  std::vector<Pos> free_cells;
  for (int y = start_room.min.y; y <= start_room.max.y; ++y) {
    for (int x = start_room.min.x; x <= start_room.max.x; ++x) {
      const Pos p{x, y};
      const bool occupied = std::any_of(objects.begin(), objects.end(),
                                        [&](const WorldObject& o) { return o.position == p; });
      if (!occupied) free_cells.push_back(p);
    }
  }
  AgentPose agent;
  agent.position = free_cells[agent_rng.below(free_cells.size())];
  agent.facing = static_cast<Direction>(agent_rng.below(4));
  agent.home_position = agent.position;
  agent.home_facing = agent.facing;

  return GridWorld(w, h, std::move(cells), std::move(doors), std::move(objects), agent, seed,
                   std::move(rooms), config);
}

nlohmann::json world_to_json(const GridWorld& world) {
  using nlohmann::json;
  json cells = json::array();
  for (int y = 0; y < world.height(); ++y) {
    std::string row;
    for (int x = 0; x < world.width(); ++x) {
      switch (world.cell({x, y})) {
        case CellType::Wall: row += '#'; break;
        case CellType::Floor: row += '.'; break;
        case CellType::Door: row += '+'; break;
      }
    }
    cells.push_back(row);
  }
  json rooms = json::array();
  for (const Room& r : world.rooms()) rooms.push_back({{"min", pos_json(r.min)}, {"max", pos_json(r.max)}});
  json doors = json::array();
  for (const Door& d : world.doors()) {
    doors.push_back({{"color", to_string(d.color)},
                     {"position", pos_json(d.position)},
                     {"state", to_string(d.state)},
                     {"home_state", to_string(d.home_state)}});
  }
  json objects = json::array();
  for (const WorldObject& o : world.objects()) {
    objects.push_back({{"kind", to_string(o.kind)},
                       {"color", to_string(o.color)},
                       {"position", o.position ? pos_json(*o.position) : json(nullptr)},
                       {"home_position", pos_json(o.home_position)}});
  }
  const AgentPose& a = world.agent();
  json agent = {{"position", pos_json(a.position)},
                {"facing", to_string(a.facing)},
                {"carrying", a.carrying ? json(*a.carrying) : json(nullptr)},
                {"home_position", pos_json(a.home_position)},
                {"home_facing", to_string(a.home_facing)}};
  const GenConfig& c = world.config();
  return json{{"schema_version", 1},
              {"seed", world.seed()},
              {"config", {{"width", c.width}, {"height", c.height}, {"rooms", c.rooms}, {"objects", c.objects}}},
              {"width", world.width()},
              {"height", world.height()},
              {"cells", cells},
              {"rooms", rooms},
              {"doors", doors},
              {"objects", objects},
              {"agent", agent}};
}

GridWorld world_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw FormatError("world snapshot must be a JSON object");
    if (doc.value("schema_version", 0) != 1) throw FormatError("unsupported world schema_version");
    const int w = doc.at("width").get<int>();
    const int h = doc.at("height").get<int>();
    if (w <= 0 || h <= 0 || w > kMaxSide || h > kMaxSide) throw FormatError("grid dimensions out of range");
    const auto& rows = doc.at("cells");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(h)) {
      throw FormatError("cells must hold one string per row");
    }
    std::vector<CellType> cells;
    for (const auto& row : rows) {
      const auto s = row.get<std::string>();
      if (s.size() != static_cast<std::size_t>(w)) throw FormatError("cell row has wrong width");
      for (char ch : s) {
        switch (ch) {
          case '#': cells.push_back(CellType::Wall); break;
          case '.': cells.push_back(CellType::Floor); break;
          case '+': cells.push_back(CellType::Door); break;
          default: throw FormatError(std::string("unknown cell character '") + ch + "'");
        }
      }
    }
    std::vector<Room> rooms;
    for (const auto& r : doc.at("rooms")) rooms.push_back(Room{pos_from(r.at("min")), pos_from(r.at("max"))});
    std::vector<Door> doors;
    for (const auto& d : doc.at("doors")) {
      const auto color = d.at("color").get<std::string>();
      const auto state = d.at("state").get<std::string>();
      const auto home = d.at("home_state").get<std::string>();
      doors.push_back(Door{enum_from(color_from_string(color), "color", d.at("color")),
                           pos_from(d.at("position")),
                           enum_from(door_state_from(state), "door state", d.at("state")),
                           enum_from(door_state_from(home), "door state", d.at("home_state"))});
    }
    std::vector<WorldObject> objects;
    for (const auto& o : doc.at("objects")) {
      WorldObject obj;
      obj.kind = enum_from(kind_from_string(o.at("kind").get<std::string>()), "kind", o.at("kind"));
      obj.color = enum_from(color_from_string(o.at("color").get<std::string>()), "color", o.at("color"));
      if (!o.at("position").is_null()) obj.position = pos_from(o.at("position"));
      obj.home_position = pos_from(o.at("home_position"));
      objects.push_back(obj);
    }
    const auto& a = doc.at("agent");
    AgentPose agent;
    agent.position = pos_from(a.at("position"));
    agent.facing = enum_from(direction_from_string(a.at("facing").get<std::string>()), "facing", a.at("facing"));
    if (!a.at("carrying").is_null()) agent.carrying = a.at("carrying").get<std::size_t>();
    agent.home_position = pos_from(a.at("home_position"));
    agent.home_facing = enum_from(direction_from_string(a.at("home_facing").get<std::string>()),
                                  "facing", a.at("home_facing"));
    const auto& c = doc.at("config");
    GenConfig config{c.at("width").get<int>(), c.at("height").get<int>(), c.at("rooms").get<int>(),
                     c.at("objects").get<int>()};
    return GridWorld(w, h, std::move(cells), std::move(doors), std::move(objects), agent,
                     doc.at("seed").get<std::uint64_t>(), std::move(rooms), config);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed world snapshot: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("inconsistent world snapshot: ") + e.what());
  }
}

std::string render_ascii(const GridWorld& world) {
  static constexpr std::array<char, 6> kGlyph = {'K', 'B', 'X', 'S', 'H', 'Q'};
  static constexpr std::array<char, 4> kArrow = {'^', '>', 'v', '<'};
  std::ostringstream out;
  for (int y = 0; y < world.height(); ++y) {
    for (int x = 0; x < world.width(); ++x) {
      const Pos p{x, y};
      char ch = '.';
      if (world.agent().position == p) {
        ch = kArrow[static_cast<std::size_t>(world.agent().facing)];
      } else if (const auto o = world.object_at(p)) {
        ch = kGlyph[static_cast<std::size_t>(world.objects()[*o].kind)];
      } else if (const auto d = world.door_at(p)) {
        ch = world.doors()[*d].state == DoorState::Open ? 'd' : 'D';
      } else if (world.cell(p) == CellType::Wall) {
        ch = '#';
      }
      out << ch;
    }
    out << '\n';
  }
  for (const auto& o : world.objects()) {
    out << kGlyph[static_cast<std::size_t>(o.kind)] << " = " << to_string(o.color) << ' '
        << to_string(o.kind) << '\n';
  }
  if (world.agent().carrying) {
    const auto& o = world.objects()[*world.agent().carrying];
    out << "carrying " << to_string(o.color) << ' ' << to_string(o.kind) << '\n';
  }
  return out.str();
}

GridWorld world_from_ascii(const std::vector<std::string>& rows,
                           const std::vector<ObjectSpec>& objects,
                           const std::vector<Color>& door_colors) {
  if (rows.empty()) throw ConfigError("empty ascii map");
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<CellType> cells;
  std::vector<Door> doors;
  std::vector<WorldObject> placed(objects.size());
  std::vector<bool> seen(objects.size(), false);
  std::optional<AgentPose> agent;
  for (int y = 0; y < h; ++y) {
    if (static_cast<int>(rows[y].size()) != w) throw ConfigError("ragged ascii map");
    for (int x = 0; x < w; ++x) {
      const char ch = rows[y][x];
      const Pos p{x, y};
      CellType type = CellType::Floor;
      switch (ch) {
        case '#': type = CellType::Wall; break;
        case '.': break;
        case 'D':
        case 'd': {
          type = CellType::Door;
          if (doors.size() >= door_colors.size()) throw ConfigError("not enough door colors");
          const auto s = ch == 'D' ? DoorState::Closed : DoorState::Open;
          doors.push_back(Door{door_colors[doors.size()], p, s, s});
          break;
        }
        case '^':
        case '>':
        case 'v':
        case '<': {
          const std::string arrows = "^>v<";
          AgentPose a;
          a.position = a.home_position = p;
          a.facing = a.home_facing = static_cast<Direction>(arrows.find(ch));
          agent = a;
          break;
        }
        default:
          if (ch >= '0' && ch <= '9' && static_cast<std::size_t>(ch - '0') < objects.size()) {
            const auto i = static_cast<std::size_t>(ch - '0');
            placed[i] = WorldObject{objects[i].kind, objects[i].color, p, p};
            seen[i] = true;
          } else {
            throw ConfigError(std::string("unknown ascii map character '") + ch + "'");
          }
      }
      cells.push_back(type);
    }
  }
  if (!agent) throw ConfigError("ascii map has no agent");
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ConfigError("every listed object must appear in the ascii map");
  }
  return GridWorld(w, h, std::move(cells), std::move(doors), std::move(placed), *agent);
}

}  // namespace echogrid
