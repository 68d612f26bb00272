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

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "echogrid/lm.hpp"

namespace echogrid {

namespace {

// Index one past the '}' matching the '{' at `open`, or npos.
std::size_t matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (ch == '\\') escaped = true;
      else if (ch == '"') in_string = false;
      continue;
    }
    if (ch == '"') in_string = true;
    else if (ch == '{') ++depth;
    else if (ch == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

std::optional<int> coerce_int(const nlohmann::json& v) {
  constexpr auto lo = std::numeric_limits<int>::min();
  constexpr auto hi = std::numeric_limits<int>::max();
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(hi)) return std::nullopt;
    return static_cast<int>(u);
  }
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < lo || i > hi) return std::nullopt;
    return static_cast<int>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d) || std::floor(d) != d || d < lo || d > hi) return std::nullopt;
    return static_cast<int>(d);
  }
  if (v.is_string()) {
    std::string_view s = v.get_ref<const std::string&>();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return out;
  }
  return std::nullopt;
}

std::string as_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace

std::optional<nlohmann::json> extract_json_object(std::string_view text) {
  for (std::size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const std::size_t end = matching_brace(text, open);
    if (end == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(text.substr(open, end - open), nullptr, false);
    if (!j.is_discarded() && j.is_object()) return j;
  }
  return std::nullopt;
}

Parsed<ParsedChoice> parse_choice(std::string_view text) {
  const auto obj = extract_json_object(text);
  if (!obj) return ParseError{"no JSON object found in model output", {}};
  if (!obj->contains("thought")) return ParseError{"missing key \"thought\"", "thought"};
  if (!obj->contains("choice")) return ParseError{"missing key \"choice\"", "choice"};
  const auto choice = coerce_int(obj->at("choice"));
  if (!choice) {
    return ParseError{"\"choice\" is not a parseable integer: " + as_text(obj->at("choice")), {}};
  }
  return ParsedChoice{as_text(obj->at("thought")), *choice};
}

Parsed<Payload> parse_json_payload(std::string_view text, std::span<const PayloadField> fields) {
  const auto obj = extract_json_object(text);
  if (!obj) return ParseError{"no JSON object found in model output", {}};
  Payload out;
  for (const auto& field : fields) {
    const auto it = obj->find(field.name);
    if (it == obj->end()) return ParseError{"missing key \"" + field.name + "\"", field.name};
    if (field.type == FieldType::Text) {
      if (!it->is_string()) return ParseError{"\"" + field.name + "\" must be a string", {}};
      out.emplace(field.name, it->get<std::string>());
      continue;
    }
    if (!it->is_array()) return ParseError{"\"" + field.name + "\" must be a list of strings", {}};
    std::vector<std::string> items;
    for (const auto& item : *it) {
      if (!item.is_string()) return ParseError{"\"" + field.name + "\" must be a list of strings", {}};
      items.push_back(item.get<std::string>());
    }
    out.emplace(field.name, std::move(items));
  }
  return out;
}

}  // namespace echogrid
