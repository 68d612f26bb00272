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

#include <cstdint>

namespace echogrid {

// SplitMix64. Integer-only, so generated worlds are identical on every
// platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  // Independent stream for one named stage. Streams derived from the same
  // seed with different stage ids never share state, so adding a stage
  // leaves the draws of existing stages untouched.
  static Rng stream(std::uint64_t seed, std::uint64_t stage) noexcept;

  std::uint64_t next() noexcept;

  // Uniform integer in [0, bound). bound must be > 0. Lemire's
  // multiply-shift with rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace echogrid
