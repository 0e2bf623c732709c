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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtlo2/network.hpp"

namespace mtlo2::optimizer {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 4000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  /// Evaluate the dev set every `dev_every` epochs (0 disables).
  int dev_every = 0;
  /// Learning rate for a 0-based epoch; empty means constant `learning_rate`.
  std::function<double(int epoch, double base_rate)> schedule;

  void validate() const;
  double rate_at(int epoch) const {
    return schedule ? schedule(epoch, learning_rate) : learning_rate;
  }
};

/// First and second moment accumulators shaped like the parameters.
struct AdamState {
  network::NetworkParams m;
  network::NetworkParams v;
  std::int64_t step = 0;

  static AdamState zeros_like(const network::NetworkParams& params);
};

/// Bias-corrected Adam update on one flat tensor at step `t` (already
/// incremented, so t >= 1).
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::int64_t t, double learning_rate, const TrainConfig& cfg);

/// Increments `state.step` and applies `adam_update` to every tensor.
/// Throws TrainingDivergence (epoch -1) on a non-finite gradient entry.
void adam_step(network::NetworkParams& params, const network::NetworkParams& grads,
               AdamState& state, const TrainConfig& cfg, double learning_rate);
inline void adam_step(network::NetworkParams& params, const network::NetworkParams& grads,
                      AdamState& state, const TrainConfig& cfg) {
  adam_step(params, grads, state, cfg, cfg.learning_rate);
}

struct DevLoss {
  int epoch = 0;
  network::LossValue loss;
};

struct TrainTrace {
  /// Loss at the parameters the epoch's gradient was computed at.
  std::vector<double> global_loss;
  std::vector<std::vector<double>> branch_loss;  // [epoch][branch]
  std::vector<DevLoss> dev;

  std::size_t size() const { return global_loss.size(); }

  /// `epoch,global_loss,branch_<name>_loss,...`
  void write_csv(const std::filesystem::path& path, const network::NetworkSpec& spec) const;
};

struct TrainResult {
  network::NetworkParams params;
  TrainTrace trace;
};

struct DevSet {
  const Eigen::MatrixXd& features;
  const Eigen::MatrixXd& targets;
};

/// Full-batch Adam: exactly cfg.epochs updates, each with the gradient of
/// the global loss over the whole training set. Throws TrainingDivergence
/// carrying the epoch index if the loss or gradient becomes non-finite.
TrainResult train(const network::NetworkSpec& spec, network::NetworkParams params,
                  const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& cfg, std::optional<DevSet> dev = std::nullopt);

}  // namespace mtlo2::optimizer
