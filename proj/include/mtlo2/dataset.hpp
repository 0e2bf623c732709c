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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtlo2/physics.hpp"
#include "mtlo2/targets.hpp"

namespace mtlo2::dataset {

inline constexpr std::array<double, 5> kTemperatureLevels = {5.0, 15.0, 25.0, 35.0, 45.0};

struct Observation {
  physics::Features features{};
  double o2 = 0.0;    // % air
  double temp = 0.0;  // degC
};

enum class SplitTag { kFull, kTrain, kDev };

const char* split_tag_name(SplitTag tag);

/// Affine map between physical targets and [0, 1]. The bounds are the fixed
/// domain of the generator, not the min/max of any particular dataset.
struct TargetScaling {
  double o2_lo = 0.0;
  double o2_hi = 100.0;
  double temp_lo = 5.0;
  double temp_hi = 45.0;

  double normalize_o2(double o2) const { return (o2 - o2_lo) / (o2_hi - o2_lo); }
  double normalize_temp(double t) const { return (t - temp_lo) / (temp_hi - temp_lo); }
  double denormalize_o2(double v) const { return o2_lo + v * (o2_hi - o2_lo); }
  double denormalize_temp(double v) const { return temp_lo + v * (temp_hi - temp_lo); }
  double o2_span() const { return o2_hi - o2_lo; }
  double temp_span() const { return temp_hi - temp_lo; }
};

struct Dataset {
  std::vector<Observation> observations;
  /// Position of each observation in the originally generated set.
  std::vector<std::size_t> source_index;
  SplitTag tag = SplitTag::kFull;
  TargetScaling scaling;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }

  /// n x 16 feature matrix.
  Eigen::MatrixXd feature_matrix() const;
};

struct NormalizedTargets {
  Eigen::MatrixXd values;  // n x 2, columns ordered as Target
  TargetScaling scaling;
};

/// m observations: O2 uniform on [0, 100) % air, T uniform over the five
/// levels, features from the physics model. `noise_sigma` > 0 adds iid
/// Gaussian noise to every feature.
Dataset generate(const physics::PhysicsParams& params, std::size_t m, std::uint64_t seed,
                 double noise_sigma = 0.0);

/// Seeded random permutation; the first floor(train_fraction * m) go to train.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

NormalizedTargets normalize_targets(const Dataset& ds);

/// Header `r1,...,r16,o2_pct_air,temp_c`, values round-trip exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_csv(const std::filesystem::path& path);

}  // namespace mtlo2::dataset
