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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "mtlo2/errors.hpp"
#include "mtlo2/optimizer.hpp"
#include "mtlo2/rng.hpp"

using namespace mtlo2;
using namespace mtlo2::optimizer;

namespace {

// Scalar Adam trajectories evaluated at 40 digits with mpmath from the
// bias-corrected recurrence (lr 1e-3, betas 0.9/0.999, eps 1e-8).
struct AdamCase {
  double theta0;
  std::vector<double> grads;
  std::vector<double> expected;
};

const std::vector<AdamCase> kAdamCases = {
    {0.0, {1.0}, {-0.000999999990000000099999999}},
    {0.0, {1.0, 1.0}, {-0.000999999990000000099999999, -0.001999999980000000199999998}},
    {0.5, {0.2, -0.7}, {0.4990000000499999975000001, 0.4995315383775543973243081}},
    {-1.25, {3e-9, 3e-9}, {-1.250230769230769230769231, -1.250461538461538461538462}},
};

network::NetworkSpec toy_spec() {
  network::NetworkSpec s;
  s.input_dim = 1;
  s.trunk = {4};
  s.branches = {{"y", {}, {Target::kO2}, 1.0}};
  return s;
}

void toy_data(Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
  x.resize(20, 1);
  y = Eigen::MatrixXd::Zero(20, 2);
  for (int j = 0; j < 20; ++j) {
    x(j, 0) = -3.0 + 6.0 * j / 19.0;
    y(j, 0) = 0.1 + 0.8 / (1.0 + std::exp(-(1.5 * x(j, 0) - 0.5)));
  }
}

}  // namespace

TEST_CASE("adam_update matches the hand-computed recurrence") {
  const TrainConfig cfg;
  for (const auto& c : kAdamCases) {
    std::vector<double> theta{c.theta0}, m{0.0}, v{0.0};
    for (std::size_t t = 0; t < c.grads.size(); ++t) {
      const std::vector<double> g{c.grads[t]};
      adam_update(theta, g, m, v, static_cast<std::int64_t>(t + 1), cfg.learning_rate, cfg);
      CHECK(std::abs(theta[0] - c.expected[t]) <= 1e-12);
    }
  }
}

TEST_CASE("zero gradient leaves parameters unchanged") {
  network::NetworkSpec spec = toy_spec();
  auto p = network::build(spec, 3);
  const auto before = p;
  auto state = AdamState::zeros_like(p);
  adam_step(p, p.zeros_like(), state, TrainConfig{});
  CHECK(state.step == 1);
  const auto a = p.layers();
  const auto b = before.layers();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->weight == b[i]->weight);
    CHECK(a[i]->bias == b[i]->bias);
  }
}

TEST_CASE("first step moves every parameter by at most the learning rate") {
  const TrainConfig cfg;
  Rng rng(5);
  std::vector<double> theta(200), g(200), m(200, 0.0), v(200, 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = rng.uniform(-1, 1);
    g[i] = std::pow(10.0, rng.uniform(-6, 3)) * (rng.uniform01() < 0.5 ? -1 : 1);
  }
  const auto before = theta;
  adam_update(theta, g, m, v, 1, cfg.learning_rate, cfg);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    CHECK(std::abs(theta[i] - before[i]) <= cfg.learning_rate * (1.0 + 1e-12));
  }
}

TEST_CASE("non-finite gradients abort the step") {
  auto spec = toy_spec();
  auto p = network::build(spec, 1);
  auto g = p.zeros_like();
  g.trunk[0].weight(0, 1) = std::numeric_limits<double>::quiet_NaN();
  auto state = AdamState::zeros_like(p);
  CHECK_THROWS_AS(adam_step(p, g, state, TrainConfig{}), TrainingDivergence);
  CHECK(state.step == 0);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = TrainConfig{};
  cfg.beta2 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = TrainConfig{};
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("one epoch is exactly one full-batch Adam update") {
  const auto spec = toy_spec();
  Eigen::MatrixXd x, y;
  toy_data(x, y);
  TrainConfig cfg;
  cfg.epochs = 1;
  const auto init = network::build(spec, 9);
  const auto res = train(spec, init, x, y, cfg);
  CHECK(res.trace.size() == 1);

  auto manual = init;
  auto state = AdamState::zeros_like(manual);
  adam_step(manual, network::backward(spec, init, x, y).grad, state, cfg);
  const auto a = res.params.layers();
  const auto b = manual.layers();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->weight == b[i]->weight);
    CHECK(a[i]->bias == b[i]->bias);
  }
}

TEST_CASE("toy sigmoid regression converges") {
  const auto spec = toy_spec();
  Eigen::MatrixXd x, y;
  toy_data(x, y);
  TrainConfig cfg;
  cfg.epochs = 2000;
  const auto res = train(spec, network::build(spec, 1), x, y, cfg);
  const double final_loss = network::loss(spec, network::forward(spec, res.params, x), y).global;
  INFO("initial " << res.trace.global_loss.front() << " final " << final_loss);
  CHECK(final_loss < 0.1 * res.trace.global_loss.front());
}

TEST_CASE("training is bit-deterministic") {
  const auto spec = toy_spec();
  Eigen::MatrixXd x, y;
  toy_data(x, y);
  TrainConfig cfg;
  cfg.epochs = 50;
  const auto a = train(spec, network::build(spec, 2), x, y, cfg);
  const auto b = train(spec, network::build(spec, 2), x, y, cfg);
  CHECK(a.trace.global_loss == b.trace.global_loss);
  const auto la = a.params.layers();
  const auto lb = b.params.layers();
  for (std::size_t i = 0; i < la.size(); ++i) CHECK(la[i]->weight == lb[i]->weight);
}

TEST_CASE("non-finite loss reports the epoch") {
  const auto spec = toy_spec();
  Eigen::MatrixXd x, y;
  toy_data(x, y);
  y(3, 0) = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.epochs = 5;
  try {
    train(spec, network::build(spec, 1), x, y, cfg);
    FAIL("expected divergence");
  } catch (const TrainingDivergence& e) {
    CHECK(e.epoch() == 0);
  }
}

TEST_CASE("schedule hook and dev cadence") {
  const auto spec = toy_spec();
  Eigen::MatrixXd x, y;
  toy_data(x, y);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.dev_every = 4;
  std::vector<int> seen;
  cfg.schedule = [&seen](int epoch, double base) {
    seen.push_back(epoch);
    return base * 0.5;
  };
  const auto res = train(spec, network::build(spec, 1), x, y, cfg, DevSet{x, y});
  CHECK(seen.size() == 10);
  REQUIRE(res.trace.dev.size() == 3);
  CHECK(res.trace.dev[1].epoch == 4);
  CHECK(res.trace.dev[0].loss.global == doctest::Approx(res.trace.global_loss[0]).epsilon(1e-14));
}

TEST_CASE("trace CSV layout") {
  network::NetworkSpec spec = toy_spec();
  spec.branches.push_back({"z", {2}, {Target::kT}, 1.0});
  TrainTrace t;
  t.global_loss = {1.0, 0.5};
  t.branch_loss = {{0.6, 0.4}, {0.3, 0.2}};
  const auto path = std::filesystem::temp_directory_path() / "mtlo2_trace.csv";
  t.write_csv(path, spec);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "epoch,global_loss,branch_y_loss,branch_z_loss");
  CHECK(row == "0,1,0.6,0.4");
  std::filesystem::remove(path);
}
