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

#include "mtlo2/optimizer.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "mtlo2/errors.hpp"
#include "mtlo2/kv_config.hpp"

namespace mtlo2::optimizer {
namespace {

std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Eigen::RowVectorXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> flat(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> flat(const Eigen::RowVectorXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (epochs < 1) throw DomainError("epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw DomainError("beta1 and beta2 must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (dev_every < 0) throw DomainError("dev_every must be >= 0");
}

AdamState AdamState::zeros_like(const network::NetworkParams& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::int64_t t, double learning_rate, const TrainConfig& cfg) {
  if (grad.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size()) {
    throw ShapeError("adam_update: parameter, gradient and moment sizes differ");
  }
  if (t < 1) throw DomainError("adam_update: step counter must be >= 1");
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    theta[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

void adam_step(network::NetworkParams& params, const network::NetworkParams& grads,
               AdamState& state, const TrainConfig& cfg, double learning_rate) {
  auto p_layers = params.layers();
  const auto g_layers = grads.layers();
  auto m_layers = state.m.layers();
  auto v_layers = state.v.layers();
  if (g_layers.size() != p_layers.size() || m_layers.size() != p_layers.size() ||
      v_layers.size() != p_layers.size()) {
    throw ShapeError("adam_step: parameter, gradient and state layouts differ");
  }
  for (std::size_t i = 0; i < g_layers.size(); ++i) {
    if (!g_layers[i]->weight.allFinite() || !g_layers[i]->bias.allFinite()) {
      throw TrainingDivergence(-1, "non-finite gradient in layer " + g_layers[i]->name);
    }
  }
  ++state.step;
  for (std::size_t i = 0; i < p_layers.size(); ++i) {
    adam_update(flat(p_layers[i]->weight), flat(g_layers[i]->weight), flat(m_layers[i]->weight),
                flat(v_layers[i]->weight), state.step, learning_rate, cfg);
    adam_update(flat(p_layers[i]->bias), flat(g_layers[i]->bias), flat(m_layers[i]->bias),
                flat(v_layers[i]->bias), state.step, learning_rate, cfg);
  }
}

void TrainTrace::write_csv(const std::filesystem::path& path,
                           const network::NetworkSpec& spec) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "epoch,global_loss";
  for (const auto& br : spec.branches) out << ",branch_" << br.name << "_loss";
  out << '\n';
  for (std::size_t e = 0; e < global_loss.size(); ++e) {
    out << e << ',' << format_double(global_loss[e]);
    for (const double l : branch_loss[e]) out << ',' << format_double(l);
    out << '\n';
  }
}

TrainResult train(const network::NetworkSpec& spec, network::NetworkParams params,
                  const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& cfg, std::optional<DevSet> dev) {
  cfg.validate();
  if (features.rows() == 0) throw DomainError("training set is empty");
  TrainResult result;
  result.trace.global_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  result.trace.branch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  AdamState state = AdamState::zeros_like(params);
  network::Workspace ws;
  network::Gradient g;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (dev && cfg.dev_every > 0 && epoch % cfg.dev_every == 0) {
      const auto outs = network::forward(spec, params, dev->features);
      result.trace.dev.push_back({epoch, network::loss(spec, outs, dev->targets)});
    }
    network::backward(spec, params, features, targets, ws, g);
    if (!std::isfinite(g.loss.global)) {
      throw TrainingDivergence(epoch, "non-finite training loss at epoch " + std::to_string(epoch));
    }
    result.trace.global_loss.push_back(g.loss.global);
    result.trace.branch_loss.push_back(g.loss.per_branch);
    try {
      adam_step(params, g.grad, state, cfg, cfg.rate_at(epoch));
    } catch (const TrainingDivergence& e) {
      throw TrainingDivergence(epoch, std::string(e.what()) + " at epoch " + std::to_string(epoch));
    }
  }
  result.params = std::move(params);
  return result;
}

}  // namespace mtlo2::optimizer
