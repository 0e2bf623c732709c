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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtlo2/dataset.hpp"
#include "mtlo2/harness.hpp"
#include "mtlo2/kv_config.hpp"
#include "mtlo2/metrics.hpp"
#include "mtlo2/network.hpp"
#include "mtlo2/optimizer.hpp"
#include "mtlo2/physics.hpp"
#include "mtlo2/rng.hpp"
#include "support/finite_difference.hpp"

namespace fs = std::filesystem;
using namespace mtlo2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo, double hi) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const bool joint : {false, true}) {
      const auto spec = testing::small_branched_spec(joint);
      auto params = network::build(spec, seed);
      Rng rng(mix_seed(seed, 100));
      for (network::Layer* l : params.layers()) {
        for (Eigen::Index i = 0; i < l->bias.size(); ++i) l->bias(i) = rng.uniform(-0.5, 0.5);
      }
      const auto x = uniform_matrix(12, spec.input_dim, rng, -1.0, 1.0);
      const auto y = uniform_matrix(12, 2, rng, 0.0, 1.0);
      const auto g = network::backward(spec, params, x, y);
      const auto r = testing::check_gradient(spec, params, g.grad, x, y, 1e-5);
      checked += r.checked;
      if (r.worst_relative > worst) {
        worst = r.worst_relative;
        where = r.worst_entry;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 10.0,
          std::to_string(checked) + " entries on 10 nets, worst rel err " + fmt("%.2e", worst) +
              " (" + where + "), " + fmt("%.2f", secs) + " s"};
}

Outcome adam_oracle() {
  struct Case {
    double theta0;
    std::vector<double> grads;
    std::vector<double> expected;
  };
  // Bias-corrected recurrence evaluated in 30-digit arithmetic; lr 1e-3,
  // betas 0.9 / 0.999, eps 1e-8.
  const std::vector<Case> cases{
      {0.0, {1.0}, {-0.000999999990000000099999999}},
      {0.0, {1.0, 1.0}, {-0.000999999990000000099999999, -0.001999999980000000199999998}},
      {0.5, {0.2, -0.7}, {0.4990000000499999975000001, 0.4995315383775543973243081}},
      {-1.25, {3e-9, 3e-9}, {-1.250230769230769230769231, -1.250461538461538461538462}},
  };
  const optimizer::TrainConfig cfg;
  double worst = 0.0;
  for (const auto& c : cases) {
    double theta = c.theta0, m = 0.0, v = 0.0;
    for (std::size_t t = 0; t < c.grads.size(); ++t) {
      optimizer::adam_update(std::span(&theta, 1), std::span(&c.grads[t], 1), std::span(&m, 1),
                             std::span(&v, 1), static_cast<std::int64_t>(t + 1), cfg.learning_rate, cfg);
      worst = std::max(worst, std::abs(theta - c.expected[t]));
    }
  }
  return {worst <= 1e-12, "4 one/two-step cases, worst abs err " + fmt("%.2e", worst)};
}

Outcome physics_invariants() {
  const auto p = physics::PhysicsParams::defaults();
  int not_one = 0, not_decreasing = 0;
  for (const double omega : p.omegas) {
    for (const double temp : dataset::kTemperatureLevels) {
      if (physics::tan_theta_ratio(p, omega, temp, 0.0) != 1.0) ++not_one;
      double prev = 1.0;
      for (int i = 1; i < 100; ++i) {
        const double r = physics::tan_theta_ratio(p, omega, temp, 100.0 * i / 99.0);
        if (!(r < prev)) ++not_decreasing;
        prev = r;
      }
    }
  }
  auto single = p;
  single.f_ref = 1.0;
  single.f_tc = 0.0;
  single.f_wc = 0.0;
  double worst = 0.0;
  for (const double omega : single.omegas) {
    for (const double temp : dataset::kTemperatureLevels) {
      for (int i = 0; i < 100; ++i) {
        const double o2 = 100.0 * i / 99.0;
        const double k = physics::ksv1(single, omega, temp);
        worst = std::max(worst, std::abs(physics::tan_theta_ratio(single, omega, temp, o2) - 1.0 / (1.0 + k * o2)));
      }
    }
  }
  return {not_one == 0 && not_decreasing == 0 && worst <= 1e-12,
          std::to_string(not_one) + " zero-O2 mismatches, " + std::to_string(not_decreasing) +
              " non-decreasing steps over 16x5 curves, single-site max err " + fmt("%.2e", worst)};
}

Outcome kde_normalization(const fs::path& root) {
  std::size_t curves = 0;
  double worst_integral = 0.0;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.rfind("kde_", 0) != 0) continue;
    std::ifstream in(entry.path());
    std::string line;
    std::getline(in, line);
    std::vector<double> x, d;
    while (std::getline(in, line)) {
      const auto cols = split_list(line);
      x.push_back(parse_double(cols.at(0)));
      d.push_back(parse_double(cols.at(1)));
    }
    if (x.empty()) continue;
    ++curves;
    worst_integral = std::max(worst_integral, std::abs(metrics::trapezoid(x, d) - 1.0));
  }

  double worst_h = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.below(3000);
    std::vector<double> s(n);
    for (auto& v : s) v = std::abs(rng.normal()) * rng.uniform(0.1, 5.0);
    long double mean = 0.0L;
    for (const double v : s) mean += v;
    mean /= static_cast<long double>(n);
    long double ss = 0.0L;
    for (const double v : s) ss += (v - mean) * (v - mean);
    const double expected =
        static_cast<double>(std::sqrt(ss / static_cast<long double>(n - 1))) * std::pow(static_cast<double>(n), -0.2);
    worst_h = std::max(worst_h, std::abs(metrics::scott_bandwidth(s) - expected));
  }
  return {curves > 0 && worst_integral <= 1e-3 && worst_h <= 1e-12,
          std::to_string(curves) + " emitted curves, worst |integral-1| " + fmt("%.2e", worst_integral) +
              ", Scott bandwidth max err " + fmt("%.2e", worst_h)};
}

Outcome dataset_contract() {
  const auto p = physics::PhysicsParams::defaults();
  const auto full = dataset::generate(p, 25000, 1);
  const auto [train, dev] = dataset::split(full, 0.8, 1);
  const auto norm = dataset::normalize_targets(full);
  double worst = 0.0;
  for (std::size_t j = 0; j < full.size(); ++j) {
    const auto& o = full.observations[j];
    const auto idx = static_cast<Eigen::Index>(j);
    worst = std::max(worst, std::abs(norm.scaling.denormalize_o2(norm.values(idx, 0)) - o.o2));
    worst = std::max(worst, std::abs(norm.scaling.denormalize_temp(norm.values(idx, 1)) - o.temp));
  }
  return {train.size() == 20000 && dev.size() == 5000 && worst <= 1e-12,
          "|train|=" + std::to_string(train.size()) + " |dev|=" + std::to_string(dev.size()) +
              ", round-trip max err " + fmt("%.2e", worst)};
}

Outcome comparative(const harness::ExperimentConfig& base, bool full_scale, const fs::path& out) {
  auto cfg = base;
  cfg.networks = {"a30", "a50", "c"};
  cfg.seeds = {1, 2, 3};
  cfg.out_dir = out;
  const auto t0 = Clock::now();
  const auto runs = harness::run_experiment(cfg);
  const double secs = seconds_since(t0);

  auto find = [&](const std::string& net, std::uint64_t seed) {
    return *std::find_if(runs.begin(), runs.end(),
                         [&](const harness::RunSummary& r) { return r.network == net && r.seed == seed; });
  };
  int c_beats_a50 = 0, a50_beats_a30 = 0;
  double c_o2 = 0.0;
  for (const std::uint64_t s : cfg.seeds) {
    const auto a30 = find("a30", s), a50 = find("a50", s), c = find("c", s);
    if (c.mae_o2_dev < a50.mae_o2_dev && c.mae_t_dev < a50.mae_t_dev) ++c_beats_a50;
    if (a50.mae_o2_dev < a30.mae_o2_dev && a50.mae_t_dev < a30.mae_t_dev) ++a50_beats_a30;
    c_o2 += c.mae_o2_dev / 3.0;
  }
  std::cout << harness::format_compare_table(runs) << std::flush;

  bool pass = c_beats_a50 >= 2 && a50_beats_a30 >= 2;
  std::string detail = std::string(full_scale ? "full scale" : "desk preset") + ": C<A50 on both in " +
                       std::to_string(c_beats_a50) + "/3 seeds, A50<A30 on both in " +
                       std::to_string(a50_beats_a30) + "/3 seeds";
  if (full_scale) {
    pass = pass && c_o2 < 1.5;
    detail += ", mean C dev MAE_O2 " + fmt("%.3f", c_o2) + " % air (< 1.5)";
  } else {
    pass = pass && secs < 1800.0;
    detail += ", runtime " + fmt("%.0f", secs) + " s (< 1800)";
  }
  return {pass, detail};
}

Outcome weight_sweep(const harness::ExperimentConfig& base, bool full_scale, const fs::path& out) {
  auto cfg = base;
  cfg.networks = {"c"};
  cfg.seeds = {1};
  cfg.out_dir = out;
  const auto rows = harness::weight_sweep(cfg, harness::default_sweep_grid());
  int slow = 0, total = 0;
  std::cout << "alpha1,alpha2,alpha3,mae_o2,mae_t\n";
  for (const auto& row : rows) {
    for (const auto& r : row.runs) {
      ++total;
      if (!(r.final_loss * 10.0 < r.initial_loss)) ++slow;
    }
    std::cout << row.alphas[0] << ',' << row.alphas[1] << ',' << row.alphas[2] << ','
              << fmt("%.4f", row.mae_o2) << ',' << fmt("%.4f", row.mae_t) << '\n';
  }
  std::ifstream in(out / "sweep.csv");
  std::string header;
  std::getline(in, header);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) {
    if (split_list(line).size() == 5) ++lines;
  }
  const bool schema = header == "alpha1,alpha2,alpha3,mae_o2,mae_t" && lines == 6;
  return {rows.size() == 6 && slow == 0 && schema,
          std::string(full_scale ? "full scale: " : "desk preset: ") + std::to_string(total) + " runs, " + std::to_string(slow) +
              " without a 10x loss drop, sweep.csv schema " + (schema ? "ok" : "wrong")};
}

Outcome determinism(const fs::path& out) {
  harness::ExperimentConfig cfg;
  cfg.m = 600;
  cfg.train.epochs = 60;
  cfg.networks = {"c", "a30"};
  cfg.seeds = {7};
  cfg.out_dir = out / "first";
  harness::run_experiment(cfg);
  cfg.out_dir = out / "second";
  harness::run_experiment(cfg);
  int files = 0, differ = 0;
  for (const char* net : {"c", "a30"}) {
    for (const char* f : {"predictions_train.csv", "predictions_dev.csv"}) {
      const auto rel = fs::path(net) / "seed_7" / f;
      const auto a = slurp(out / "first" / rel);
      ++files;
      if (a.empty() || a != slurp(out / "second" / rel)) ++differ;
    }
  }
  return {differ == 0, std::to_string(files - differ) + "/" + std::to_string(files) +
                           " prediction CSVs byte-identical across repeated runs"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtlo2 acceptance suite"};
  std::string scale = "full";
  fs::path out = fs::temp_directory_path() / "mtlo2_acceptance";
  app.add_option("--scale", scale, "Tier for the comparative run and the sweep")->check(CLI::IsMember({"full", "desk"}));
  std::vector<int> only;
  app.add_option("--out", out, "Scratch directory for run outputs");
  app.add_option("--only", only, "Run a subset of criteria")->delimiter(',')->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  fs::remove_all(out);
  fs::create_directories(out);

  harness::ExperimentConfig full;
  harness::ExperimentConfig desk;
  desk.apply_desk();

  std::array<Outcome, 9> results{};
  if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8};
  auto selected = [&](int id) { return std::find(only.begin(), only.end(), id) != only.end(); };
  auto run = [&](int id, const std::function<Outcome()>& fn) {
    if (!selected(id)) return;
    std::cerr << "[acceptance] criterion " << id << " ...\n";
    try {
      results[id] = fn();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("exception: ") + e.what()};
    }
    std::cerr << "[acceptance] criterion " << id << (results[id].pass ? " PASS: " : " FAIL: ")
              << results[id].detail << '\n';
  };
  run(1, gradient_correctness);
  run(2, adam_oracle);
  run(3, physics_invariants);
  run(5, dataset_contract);
  run(8, [&] { return determinism(out / "determinism"); });
  run(6, [&] { return comparative(scale == "full" ? full : desk, scale == "full", out / "compare"); });
  run(7, [&] { return weight_sweep(scale == "full" ? full : desk, scale == "full", out / "sweep"); });
  run(4, [&] { return kde_normalization(out); });

  const std::array<const char*, 9> names{"",
                                         "gradient correctness",
                                         "Adam oracle",
                                         "physics invariants",
                                         "KDE normalization",
                                         "dataset contract",
                                         "comparative reproduction",
                                         "weight-sweep report",
                                         "determinism"};
  int failed = 0;
  for (int id = 1; id <= 8; ++id) {
    if (!selected(id)) continue;
    std::cout << (results[id].pass ? "PASS" : "FAIL") << " criterion " << id << " (" << names[id]
              << "): " << results[id].detail << '\n';
    if (!results[id].pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
