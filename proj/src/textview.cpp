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

#include "echogrid/textview.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace echogrid {

namespace {

// Sentence templates. Prompt snapshot tests assert these bytes.
constexpr std::string_view kWallSentence = "You are {n} from a wall.";
constexpr std::string_view kSeeSentence = "You see {entity} {where}.";
constexpr std::string_view kCarrySentence = "You are carrying the {object}.";
constexpr std::string_view kNothingSentence = "You see nothing of note.";

std::string fill(std::string_view tmpl, std::string_view key, std::string_view value) {
  std::string out(tmpl);
  const auto at = out.find(key);
  if (at != std::string::npos) out.replace(at, key.size(), value);
  return out;
}

std::string steps(int n) {
  return number_word(n) + (n == 1 ? " step" : " steps");
}

std::string where(int ahead, int right) {
  std::string lateral;
  if (right != 0) lateral = steps(std::abs(right)) + (right < 0 ? " to the left" : " to the right");
  if (ahead == 0) return lateral;
  std::string out = steps(ahead) + " ahead";
  if (!lateral.empty()) out += " and " + lateral;
  return out;
}

std::string describe(const VisibleEntity& e) {
  if (e.type == EntityType::Object) {
    return "a " + std::string(to_string(e.color)) + " " + std::string(to_string(e.kind));
  }
  const bool open = e.door_state == DoorState::Open;
  return std::string(open ? "an open " : "a closed ") + std::string(to_string(e.color)) + " door";
}

std::string_view name_of(const VisibleEntity& e) {
  return e.type == EntityType::Door ? std::string_view("door") : to_string(e.kind);
}

// Nearest first (Manhattan), then left before right, then color name, then
// entity name, then depth.
bool render_order(const VisibleEntity& a, const VisibleEntity& b) {
  const int da = a.ahead + std::abs(a.right);
  const int db = b.ahead + std::abs(b.right);
  if (da != db) return da < db;
  const int sa = (a.right > 0) - (a.right < 0);
  const int sb = (b.right > 0) - (b.right < 0);
  if (sa != sb) return sa < sb;
  if (to_string(a.color) != to_string(b.color)) return to_string(a.color) < to_string(b.color);
  if (name_of(a) != name_of(b)) return name_of(a) < name_of(b);
  return a.ahead < b.ahead;
}

std::string trim_lower(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

}  // namespace

Pos egocentric_to_world(const AgentPose& agent, int ahead, int right) noexcept {
  return offset(offset(agent.position, agent.facing, ahead), turn_right(agent.facing), right);
}

bool line_of_sight(const GridWorld& world, int ahead, int right) {
  // Walk every cell whose interior the center-to-center segment crosses.
  // Cell (i, j) in (right, ahead) space has interior (i-1/2, i+1/2) x
  // (j-1/2, j+1/2); the next boundary crossed along x is at (2i+1)/(2|dx|)
  // of the way, along y at (2j+1)/(2|dy|). Comparing the two fractions by
  // cross-multiplication keeps the walk exact.
  const int nx = std::abs(right);
  const int ny = ahead;
  const int sx = right < 0 ? -1 : 1;
  int ix = 0;
  int iy = 0;
  while (ix < nx || iy < ny) {
    const long lhs = static_cast<long>(1 + 2 * ix) * ny;
    const long rhs = static_cast<long>(1 + 2 * iy) * nx;
    if (lhs == rhs) {
      ++ix;
      ++iy;
    } else if (ny == 0 || (nx != 0 && lhs < rhs)) {
      ++ix;
    } else {
      ++iy;
    }
    if (ix == nx && iy == ny) break;
    if (world.is_opaque(egocentric_to_world(world.agent(), iy, sx * ix))) return false;
  }
  return true;
}

Observation render(const GridWorld& world) {
  Observation obs;
  obs.menus = world.action_menus();
  const AgentPose& agent = world.agent();

  for (int ahead = 0; ahead < kViewDepth; ++ahead) {
    for (int right = -kViewHalfWidth; right <= kViewHalfWidth; ++right) {
      if (ahead == 0 && right == 0) continue;
      const Pos p = egocentric_to_world(agent, ahead, right);
      if (!world.in_bounds(p) || !line_of_sight(world, ahead, right)) continue;
      if (const auto o = world.object_at(p)) {
        const auto& obj = world.objects()[*o];
        VisibleEntity e;
        e.type = EntityType::Object;
        e.color = obj.color;
        e.kind = obj.kind;
        e.ahead = ahead;
        e.right = right;
        obs.visible_entities.push_back(e);
      } else if (const auto d = world.door_at(p)) {
        const auto& door = world.doors()[*d];
        VisibleEntity e;
        e.type = EntityType::Door;
        e.color = door.color;
        e.door_state = door.state;
        e.ahead = ahead;
        e.right = right;
        obs.visible_entities.push_back(e);
      }
    }
  }
  std::sort(obs.visible_entities.begin(), obs.visible_entities.end(), render_order);

  for (int ahead = 1; ahead < kViewDepth; ++ahead) {
    const Pos p = egocentric_to_world(agent, ahead, 0);
    if (!world.is_opaque(p)) continue;
    if (world.cell(p) == CellType::Wall) obs.wall_distance = ahead - 1;
    break;
  }

  std::vector<std::string> sentences;
  if (obs.wall_distance) sentences.push_back(fill(kWallSentence, "{n}", steps(*obs.wall_distance)));
  for (const auto& e : obs.visible_entities) {
    sentences.push_back(fill(fill(kSeeSentence, "{entity}", describe(e)), "{where}", where(e.ahead, e.right)));
  }
  if (agent.carrying) {
    const auto& o = world.objects()[*agent.carrying];
    sentences.push_back(fill(kCarrySentence, "{object}",
                             std::string(to_string(o.color)) + " " + std::string(to_string(o.kind))));
  }
  if (sentences.empty()) sentences.emplace_back(kNothingSentence);

  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) obs.text += ' ';
    obs.text += sentences[i];
  }
  return obs;
}

std::string number_word(int n) {
  static constexpr std::array<std::string_view, 11> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) return std::string(kWords[static_cast<std::size_t>(n)]);
  return std::to_string(n);
}

std::string render_menus(const ActionMenus& menus) {
  auto block = [](const std::map<int, std::string>& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [index, name] : m) {
      if (!first) out += ", ";
      first = false;
      out += std::to_string(index) + ": \"" + name + "\"";
    }
    return out + "}";
  };
  return "valid_actions=" + block(menus.valid) + ", invalid_actions=" + block(menus.invalid);
}

std::string render_goal(const Goal& goal) {
  return "Pick up the " + std::string(to_string(goal.color)) + " " + std::string(to_string(goal.kind));
}

std::string canonicalize_goal(std::string_view text) {
  std::string s = trim_lower(text);
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ' ')) s.pop_back();
  constexpr std::string_view kPrefix = "pick up ";
  if (s.rfind(kPrefix, 0) == 0 && s.compare(kPrefix.size(), 4, "the ") != 0) {
    std::string rest = s.substr(kPrefix.size());
    if (rest.rfind("a ", 0) == 0) rest.erase(0, 2);
    else if (rest.rfind("an ", 0) == 0) rest.erase(0, 3);
    s = std::string(kPrefix) + "the " + rest;
  }
  return s;
}

std::optional<Goal> parse_goal(std::string_view text) {
  const std::string s = canonicalize_goal(text);
  constexpr std::string_view kPrefix = "pick up the ";
  if (s.rfind(kPrefix, 0) != 0) return std::nullopt;
  std::istringstream words(s.substr(kPrefix.size()));
  std::string color, kind, extra;
  if (!(words >> color >> kind) || (words >> extra)) return std::nullopt;
  const auto c = color_from_string(color);
  const auto k = kind_from_string(kind);
  if (!c || !k) return std::nullopt;
  return Goal{*c, *k};
}

}  // namespace echogrid
