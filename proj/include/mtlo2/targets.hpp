// Copyright 2026 The mtlo2 Authors
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

#include <cstddef>
#include <string>
#include <string_view>

#include "mtlo2/errors.hpp"

namespace mtlo2 {

/// Regression targets. The enumerator value is the column index in every
/// n x 2 target or prediction matrix.
enum class Target : int { kO2 = 0, kT = 1 };

inline constexpr std::size_t kNumTargets = 2;

inline std::string_view target_label(Target t) { return t == Target::kO2 ? "O2" : "T"; }

/// Accepts "O2"/"o2" and "T"/"t"; throws FormatError otherwise.
inline Target parse_target(std::string_view label) {
  if (label == "O2" || label == "o2") return Target::kO2;
  if (label == "T" || label == "t") return Target::kT;
  throw FormatError("unknown target label '" + std::string(label) + "'");
}

}  // namespace mtlo2
