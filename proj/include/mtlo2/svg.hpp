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

#include <filesystem>
#include <string>
#include <vector>

#include "mtlo2/metrics.hpp"

/// Minimal SVG renderings of boxplots and KDE curves for quick inspection.
namespace mtlo2::svg {

/// Whiskers at min/max, box at Q1..Q3, median line in red.
void write_boxplot(const std::vector<metrics::BinStats>& bins, const std::string& title,
                   const std::string& y_label, const std::filesystem::path& path);

void write_kde(const metrics::KdeCurve& curve, const std::string& title, const std::string& x_label,
               const std::filesystem::path& path);

}  // namespace mtlo2::svg
