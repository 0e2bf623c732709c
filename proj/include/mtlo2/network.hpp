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
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlo2/kv_config.hpp"
#include "mtlo2/targets.hpp"

/// Branched sigmoid MLP: a shared trunk whose last activation (the shared
/// representation) feeds one or more task branches.
namespace mtlo2::network {

struct Branch {
  std::string name;
  std::vector<int> hidden;       // task-specific hidden widths, may be empty
  std::vector<Target> outputs;   // one sigmoid output neuron per entry
  double loss_weight = 1.0;      // alpha
};

struct NetworkSpec {
  int input_dim = 16;
  std::vector<int> trunk;
  std::vector<Branch> branches;

  /// Throws ShapeError on a malformed topology. With `require_both_targets`
  /// the branches together must emit O2 and T.
  void validate(bool require_both_targets = true) const;

  std::size_t parameter_count() const;
  int trunk_output_dim() const { return trunk.empty() ? input_dim : trunk.back(); }

  /// Plain-text form:
  ///   input_dim = 16
  ///   trunk = 50,50,50
  ///   branch = o2 | 5,5 | O2 | 5
  /// with branch fields name | hidden widths | outputs | loss weight.
  static NetworkSpec from_config(const KeyValueConfig& cfg);
  void write_config(KeyValueConfig& cfg) const;
  static NetworkSpec load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Dense layer computing sigmoid(x * weight + bias) for row-major batches.
struct Layer {
  std::string name;
  Eigen::MatrixXd weight;     // fan_in x fan_out
  Eigen::RowVectorXd bias;    // 1 x fan_out
};

struct NetworkParams {
  std::vector<Layer> trunk;
  std::vector<std::vector<Layer>> branches;  // last layer of each is the output layer

  std::size_t parameter_count() const;
  /// Trunk layers first, then each branch in spec order.
  std::vector<Layer*> layers();
  std::vector<const Layer*> layers() const;
  NetworkParams zeros_like() const;
  bool all_finite() const;
};

/// Glorot-uniform weights, U(-L, L) with L = sqrt(6 / (fan_in + fan_out));
/// zero biases.
NetworkParams build(const NetworkSpec& spec, std::uint64_t seed);

double sigmoid(double z);

/// Per-branch outputs, each n x outputs.size().
using BranchOutputs = std::vector<Eigen::MatrixXd>;

BranchOutputs forward(const NetworkSpec& spec, const NetworkParams& params,
                      const Eigen::MatrixXd& batch);

struct LossValue {
  double global = 0.0;
  std::vector<double> per_branch;
};

/// L_i = (1/n) sum_j sum_k (y - yhat)^2 over branch i's outputs;
/// global = sum_i alpha_i * L_i. `targets` is n x 2 in Target column order.
LossValue loss(const NetworkSpec& spec, const BranchOutputs& outputs,
               const Eigen::MatrixXd& targets);

struct Gradient {
  NetworkParams grad;
  LossValue loss;
};

/// Scratch activations and deltas, reusable across calls.
struct Workspace {
  std::vector<Eigen::MatrixXd> trunk_acts;
  std::vector<std::vector<Eigen::MatrixXd>> branch_acts;
  std::vector<std::vector<Eigen::MatrixXd>> deltas;       // per chain: branches, then trunk
  std::vector<std::vector<Eigen::MatrixXd>> input_grads;
  Eigen::MatrixXd d_shared;
  Eigen::MatrixXd residual;
};

/// Exact gradient of the global loss by reverse-mode accumulation. Trunk
/// gradients sum the contributions of all branches in spec order.
Gradient backward(const NetworkSpec& spec, const NetworkParams& params,
                  const Eigen::MatrixXd& batch, const Eigen::MatrixXd& targets);

/// Same as above, writing into `out` and reusing `ws`.
void backward(const NetworkSpec& spec, const NetworkParams& params, const Eigen::MatrixXd& batch,
              const Eigen::MatrixXd& targets, Workspace& ws, Gradient& out);

/// Which branch output column is reported as the prediction for a target.
struct ReportSource {
  std::size_t branch = 0;
  Eigen::Index column = 0;
};

/// The branch with the most task-specific hidden layers wins; ties go to
/// the branch with fewer outputs, then to the earlier branch.
std::array<ReportSource, kNumTargets> report_sources(const NetworkSpec& spec);

/// n x 2 normalized predictions taken from `report_sources`.
Eigen::MatrixXd predict(const NetworkSpec& spec, const NetworkParams& params,
                        const Eigen::MatrixXd& batch);

// Checkpoint format, version 1 (text):
//   mtlo2-checkpoint 1
//   tensors <count>
//   tensor <name> <rows> <cols>
//   <rows lines of cols values, row-major, shortest exact decimal>
// Tensor names are <layer>.weight and <layer>.bias with layers named
// trunk.<i> and branch.<name>.<i>; the last index of a branch is its
// output layer.
inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const NetworkParams& params);
NetworkParams read_checkpoint(std::istream& in, const NetworkSpec& spec);
void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkSpec& spec);

}  // namespace mtlo2::network
