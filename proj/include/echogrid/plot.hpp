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

#include <string>
#include <vector>

namespace echogrid {

struct Curve {
  std::string label;
  std::vector<double> values;
};

// Deterministic SVG line chart, one polyline per curve, x = episode index.
std::string render_svg_chart(const std::vector<Curve>& curves, const std::string& title, const std::string& y_label);

}  // namespace echogrid
