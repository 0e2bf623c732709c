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

// mtlo2: generate synthetic luminescence data, train single- and multi-task
// networks, compare architectures and sweep loss weights.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mtlo2/dataset.hpp"
#include "mtlo2/errors.hpp"
#include "mtlo2/harness.hpp"

namespace {

using mtlo2::harness::ExperimentConfig;
using mtlo2::harness::LossWeights;

struct CommonFlags {
  std::string config;
  std::string network;
  std::optional<int> epochs;
  std::optional<std::size_t> m;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string alphas;
  std::string out;
  bool desk = false;
  std::optional<double> noise_sigma;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "plain-text key = value config file");
  cmd->add_option("--network", f.network, "a10|a30|a50|a80|b|c|spec:<file>, comma-separated for compare");
  cmd->add_option("--epochs", f.epochs, "training epochs (default 4000)");
  cmd->add_option("--m", f.m, "number of generated observations (default 25000)");
  cmd->add_option("--seed", f.seed, "single seed");
  cmd->add_option("--seeds", f.seeds, "comma-separated seeds");
  cmd->add_option("--alphas", f.alphas, "loss weights a1,a2,a3 for joint, O2 and T branches");
  cmd->add_option("--out", f.out, "output directory (default runs)");
  cmd->add_flag("--desk", f.desk, "CI-speed preset: m=5000, epochs=1500");
  cmd->add_option("--noise-sigma", f.noise_sigma, "Gaussian noise on every feature (default 0)");
  cmd->add_flag("--svg", f.svg, "also render boxplots and KDE curves as SVG");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (f.desk) cfg.apply_desk();
  if (!f.config.empty()) cfg.apply(mtlo2::KeyValueConfig::load(f.config));

  mtlo2::KeyValueConfig flags;
  if (!f.network.empty()) flags.set("networks", f.network);
  if (f.epochs) flags.set("epochs", std::to_string(*f.epochs));
  if (f.m) flags.set("m", std::to_string(*f.m));
  if (f.seed) flags.set("seed", std::to_string(*f.seed));
  if (!f.seeds.empty()) flags.set("seeds", f.seeds);
  if (!f.alphas.empty()) flags.set("alphas", f.alphas);
  if (!f.out.empty()) flags.set("out", f.out);
  if (f.noise_sigma) flags.set("noise_sigma", mtlo2::format_double(*f.noise_sigma));
  if (f.svg) flags.set("svg", "true");
  cfg.apply(flags);
  return cfg;
}

std::vector<LossWeights> parse_grid(const std::string& text) {
  std::vector<LossWeights> grid;
  for (const auto& row : mtlo2::split_list(text, ';')) {
    const auto v = mtlo2::split_list(row);
    if (v.size() != 3) throw mtlo2::FormatError("grid rows need three weights: '" + row + "'");
    grid.push_back({mtlo2::parse_double(v[0]), mtlo2::parse_double(v[1]), mtlo2::parse_double(v[2])});
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task neural networks for oxygen and temperature from luminescence data"};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, compare_flags, sweep_flags;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset and its train/dev split as CSV");
  add_common(gen, gen_flags);

  auto* train = app.add_subcommand("train", "train one network per seed and write reports");
  add_common(train, train_flags);

  auto* compare = app.add_subcommand("compare", "train several networks on shared data");
  add_common(compare, compare_flags);

  auto* sweep = app.add_subcommand("sweep", "loss-weight grid for network C");
  add_common(sweep, sweep_flags);
  std::string grid_text;
  sweep->add_option("--grid", grid_text, "rows 'a1,a2,a3;a1,a2,a3;...' (default: six reference rows)");

  auto* report = app.add_subcommand("report", "recompute metrics from stored prediction CSVs");
  std::string run_dir;
  std::string report_out;
  report->add_option("run_dir", run_dir, "run directory containing predictions_*.csv")->required();
  report->add_option("--out", report_out, "where to write the reports (default: run_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto cfg = resolve(gen_flags);
      cfg.validate();
      std::filesystem::create_directories(cfg.out_dir);
      cfg.to_config().save(cfg.out_dir / "config.txt");
      for (const auto seed : cfg.seeds) {
        const auto dir = cfg.seeds.size() > 1 ? cfg.out_dir / ("seed_" + std::to_string(seed)) : cfg.out_dir;
        std::filesystem::create_directories(dir);
        const auto full = mtlo2::dataset::generate(cfg.physics, cfg.m, seed, cfg.noise_sigma);
        const auto [tr, dv] = mtlo2::dataset::split(full, cfg.train_fraction, seed);
        mtlo2::dataset::write_csv(full, dir / "dataset.csv");
        mtlo2::dataset::write_csv(tr, dir / "train.csv");
        mtlo2::dataset::write_csv(dv, dir / "dev.csv");
        std::printf("seed %llu: %zu observations (%zu train, %zu dev) -> %s\n",
                    static_cast<unsigned long long>(seed), full.size(), tr.size(), dv.size(),
                    dir.string().c_str());
      }
    } else if (train->parsed()) {
      auto cfg = resolve(train_flags);
      cfg.networks.resize(1);
      const auto runs = mtlo2::harness::run_experiment(cfg);
      std::cout << mtlo2::harness::format_compare_table(runs);
    } else if (compare->parsed()) {
      if (compare_flags.network.empty()) compare_flags.network = "a30,a50,a80,b,c";
      const auto cfg = resolve(compare_flags);
      const auto runs = mtlo2::harness::run_experiment(cfg);
      std::cout << mtlo2::harness::format_compare_table(runs);
    } else if (sweep->parsed()) {
      auto cfg = resolve(sweep_flags);
      if (sweep_flags.network.empty()) cfg.networks = {"c"};
      const auto grid = grid_text.empty() ? mtlo2::harness::default_sweep_grid() : parse_grid(grid_text);
      const auto rows = mtlo2::harness::weight_sweep(cfg, grid);
      std::printf("%6s %6s %6s %16s %14s\n", "alpha1", "alpha2", "alpha3", "MAE_O2 [% air]", "MAE_T [degC]");
      for (const auto& r : rows) {
        std::printf("%6.2f %6.2f %6.2f %16.3f %14.3f\n", r.alphas[0], r.alphas[1], r.alphas[2],
                    r.mae_o2, r.mae_t);
      }
    } else if (report->parsed()) {
      const auto reps = mtlo2::harness::recompute_reports(run_dir, report_out.empty() ? run_dir : report_out);
      for (const auto& r : reps) {
        std::printf("%s %s: MAE_O2 %.4f %% air, MAE_T %.4f degC (n=%zu)\n", r.network.c_str(),
                    r.dataset_tag.c_str(), r.o2.mae, r.temp.mae, r.o2.ae.size());
      }
    }
  } catch (const mtlo2::TrainingDivergence& e) {
    std::fprintf(stderr, "training diverged at epoch %d: %s\n", e.epoch(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
