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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mtlo2/dataset.hpp"
#include "mtlo2/kv_config.hpp"
#include "mtlo2/metrics.hpp"
#include "mtlo2/network.hpp"
#include "mtlo2/optimizer.hpp"
#include "mtlo2/physics.hpp"

/// Experiment runner: physics -> dataset -> network -> training -> metrics.
namespace mtlo2::harness {

/// (alpha1, alpha2, alpha3) for the joint, O2 and T branches.
using LossWeights = std::array<double, 3>;

struct ExperimentConfig {
  physics::PhysicsParams physics = physics::PhysicsParams::defaults();
  std::size_t m = 25000;
  double train_fraction = 0.8;
  double noise_sigma = 0.0;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> networks{"c"};
  std::optional<LossWeights> alphas;
  optimizer::TrainConfig train;
  std::filesystem::path out_dir = "runs";
  bool svg = false;

  /// m = 5000, epochs = 1500.
  void apply_desk();

  /// Applies the keys present in `cfg` on top of the current values. A
  /// `physics` key names a physics parameter file; physics fields may also
  /// appear inline. `desk = true` applies the preset before other keys.
  void apply(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
  void validate() const;
};

/// a10 | a30 | a50 | a80 | b | c | spec:<file>
network::NetworkSpec build_architecture(std::string_view selector);

/// Sets branch loss weights by name: alpha1 -> "joint", alpha2 -> "o2",
/// alpha3 -> "t". Branches with other names keep their weights.
void apply_loss_weights(network::NetworkSpec& spec, const LossWeights& alphas);

struct PreparedData {
  dataset::Dataset train;
  dataset::Dataset dev;
  Eigen::MatrixXd train_x;
  Eigen::MatrixXd train_y;  // normalized targets
  Eigen::MatrixXd dev_x;
  Eigen::MatrixXd dev_y;
};

/// Generate, split and normalize for one seed. Every network run with the
/// same seed sees the identical dataset and split.
PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunSummary {
  std::string network;
  std::uint64_t seed = 0;
  double mae_o2_train = 0.0;
  double mae_t_train = 0.0;
  double mae_o2_dev = 0.0;
  double mae_t_dev = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::filesystem::path dir;
};

/// Trains one network on prepared data and writes spec.txt, checkpoint.txt,
/// trace.csv, predictions_{train,dev}.csv and {train,dev}/report files into `dir`.
RunSummary run_single(const ExperimentConfig& cfg, const network::NetworkSpec& spec,
                      const std::string& label, std::uint64_t seed, const PreparedData& data,
                      const std::filesystem::path& dir);

/// Every (seed, network) pair; results land in out_dir/<network>/seed_<s>/
/// plus compare.csv, compare_summary.csv and config.txt. compare.csv is
/// rewritten after each run so completed runs survive a later failure.
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  LossWeights alphas{};
  double mae_o2 = 0.0;  // mean dev MAE over seeds
  double mae_t = 0.0;
  std::vector<RunSummary> runs;
};

/// The six loss-weight rows studied for network C.
std::vector<LossWeights> default_sweep_grid();

/// One training of network C (or the configured 3-branch network) per grid
/// point and seed. Writes sweep.csv (alpha1,alpha2,alpha3,mae_o2,mae_t) and
/// sweep_runs.csv with per-run losses.
std::vector<SweepRow> weight_sweep(const ExperimentConfig& cfg, const std::vector<LossWeights>& grid);

/// Recomputes train/dev reports of a run directory from its prediction CSVs.
std::vector<metrics::EvalReport> recompute_reports(const std::filesystem::path& run_dir,
                                                   const std::filesystem::path& out_dir);

/// Text table of mean dev MAE per network.
std::string format_compare_table(const std::vector<RunSummary>& runs);

}  // namespace mtlo2::harness
