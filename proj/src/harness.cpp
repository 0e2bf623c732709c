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

#include "mtlo2/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mtlo2/errors.hpp"
#include "mtlo2/svg.hpp"

namespace mtlo2::harness {
namespace {

using network::Branch;
using network::NetworkSpec;

constexpr int kSharedWidth = 50;
constexpr int kTaskWidth = 5;

std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_str(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

std::string alpha_tag(const LossWeights& a) {
  return format_double(a[0]) + "_" + format_double(a[1]) + "_" + format_double(a[2]);
}

metrics::Predictions make_predictions(const dataset::Dataset& ds, const Eigen::MatrixXd& pred_norm) {
  metrics::Predictions p;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    p.true_o2.push_back(ds.observations[j].o2);
    p.true_temp.push_back(ds.observations[j].temp);
    p.pred_o2.push_back(ds.scaling.denormalize_o2(pred_norm(row, static_cast<int>(Target::kO2))));
    p.pred_temp.push_back(ds.scaling.denormalize_temp(pred_norm(row, static_cast<int>(Target::kT))));
  }
  return p;
}

metrics::EvalReport report_from(const metrics::Predictions& p, const std::string& label,
                                const std::string& tag, std::uint64_t seed) {
  return metrics::evaluate(label, tag, seed, p.true_o2, p.true_temp, p.pred_o2, p.pred_temp);
}

void write_svgs(const metrics::EvalReport& r, const std::filesystem::path& dir) {
  const std::string title = r.network + " (" + r.dataset_tag + ")";
  svg::write_boxplot(r.o2.bins, "AE O2 " + title, "AE [% air]", dir / "box_o2.svg");
  svg::write_boxplot(r.temp.bins, "AE T " + title, "AE [degC]", dir / "box_t.svg");
  if (r.o2.kde) svg::write_kde(*r.o2.kde, "KDE AE O2 " + title, "AE [% air]", dir / "kde_o2.svg");
  if (r.temp.kde) svg::write_kde(*r.temp.kde, "KDE AE T " + title, "AE [degC]", dir / "kde_t.svg");
}

void write_compare_csv(const std::vector<RunSummary>& runs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "network,seed,mae_o2_train,mae_t_train,mae_o2_dev,mae_t_dev,initial_loss,final_loss\n";
  for (const auto& r : runs) {
    out << r.network << ',' << r.seed << ',' << format_double(r.mae_o2_train) << ','
        << format_double(r.mae_t_train) << ',' << format_double(r.mae_o2_dev) << ','
        << format_double(r.mae_t_dev) << ',' << format_double(r.initial_loss) << ','
        << format_double(r.final_loss) << '\n';
  }
}

struct MeanMae {
  std::size_t count = 0;
  double o2_dev = 0.0, t_dev = 0.0, o2_train = 0.0, t_train = 0.0;
};

std::vector<std::pair<std::string, MeanMae>> mean_by_network(const std::vector<RunSummary>& runs) {
  std::vector<std::pair<std::string, MeanMae>> out;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == r.network; });
    if (it == out.end()) {
      out.emplace_back(r.network, MeanMae{});
      it = out.end() - 1;
    }
    auto& m = it->second;
    ++m.count;
    m.o2_dev += r.mae_o2_dev;
    m.t_dev += r.mae_t_dev;
    m.o2_train += r.mae_o2_train;
    m.t_train += r.mae_t_train;
  }
  for (auto& [name, m] : out) {
    const auto n = static_cast<double>(m.count);
    m.o2_dev /= n;
    m.t_dev /= n;
    m.o2_train /= n;
    m.t_train /= n;
  }
  return out;
}

void write_summary_csv(const std::vector<RunSummary>& runs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "network,runs,mae_o2_dev,mae_t_dev,mae_o2_train,mae_t_train\n";
  for (const auto& [name, m] : mean_by_network(runs)) {
    out << name << ',' << m.count << ',' << format_double(m.o2_dev) << ',' << format_double(m.t_dev)
        << ',' << format_double(m.o2_train) << ',' << format_double(m.t_train) << '\n';
  }
}

}  // namespace

void ExperimentConfig::apply_desk() {
  m = 5000;
  train.epochs = 1500;
}

void ExperimentConfig::apply(const KeyValueConfig& cfg) {
  static const std::set<std::string> kKeys{
      "desk",   "physics", "m",      "train_fraction", "noise_sigma", "seeds",    "seed",
      "networks", "network", "alphas", "epochs",       "learning_rate", "beta1", "beta2",
      "epsilon", "dev_every", "out",  "svg"};
  if (const auto desk = cfg.get("desk"); desk && (*desk == "true" || *desk == "1")) apply_desk();
  if (const auto path = cfg.get("physics")) physics = physics::PhysicsParams::load(*path);
  // Inline physics keys override the file.
  KeyValueConfig phys;
  physics.write_config(phys);
  bool inline_physics = false;
  for (const auto& [k, v] : cfg.entries()) {
    if (phys.contains(k)) {
      phys.set(k, v);
      inline_physics = true;
    } else if (!kKeys.contains(k)) {
      throw FormatError("unknown config key '" + k + "'");
    }
  }
  if (inline_physics) physics = physics::PhysicsParams::from_config(phys);

  m = static_cast<std::size_t>(cfg.get_int("m", static_cast<std::int64_t>(m)));
  train_fraction = cfg.get_double("train_fraction", train_fraction);
  noise_sigma = cfg.get_double("noise_sigma", noise_sigma);
  if (const auto s = cfg.get("seeds")) {
    seeds.clear();
    for (const auto& item : split_list(*s)) seeds.push_back(static_cast<std::uint64_t>(parse_int(item)));
  } else if (const auto s1 = cfg.get("seed")) {
    seeds = {static_cast<std::uint64_t>(parse_int(*s1))};
  }
  if (const auto n = cfg.get("networks")) networks = split_list(*n);
  if (const auto n = cfg.get("network")) networks = {trim(*n)};
  if (const auto a = cfg.get("alphas")) {
    const auto v = split_list(*a);
    if (v.size() != 3) throw FormatError("alphas needs three comma-separated values");
    alphas = LossWeights{parse_double(v[0]), parse_double(v[1]), parse_double(v[2])};
  }
  train.epochs = static_cast<int>(cfg.get_int("epochs", train.epochs));
  train.learning_rate = cfg.get_double("learning_rate", train.learning_rate);
  train.beta1 = cfg.get_double("beta1", train.beta1);
  train.beta2 = cfg.get_double("beta2", train.beta2);
  train.epsilon = cfg.get_double("epsilon", train.epsilon);
  train.dev_every = static_cast<int>(cfg.get_int("dev_every", train.dev_every));
  if (const auto o = cfg.get("out")) out_dir = *o;
  if (const auto s = cfg.get("svg")) svg = (*s == "true" || *s == "1");
}

KeyValueConfig ExperimentConfig::to_config() const {
  KeyValueConfig cfg;
  cfg.set("m", std::to_string(m));
  cfg.set("train_fraction", format_double(train_fraction));
  cfg.set("noise_sigma", format_double(noise_sigma));
  cfg.set("seeds", join_u64(seeds));
  cfg.set("networks", join_str(networks));
  if (alphas) {
    cfg.set("alphas", format_double((*alphas)[0]) + "," + format_double((*alphas)[1]) + "," +
                          format_double((*alphas)[2]));
  }
  cfg.set("epochs", std::to_string(train.epochs));
  cfg.set("learning_rate", format_double(train.learning_rate));
  cfg.set("beta1", format_double(train.beta1));
  cfg.set("beta2", format_double(train.beta2));
  cfg.set("epsilon", format_double(train.epsilon));
  cfg.set("dev_every", std::to_string(train.dev_every));
  cfg.set("out", out_dir.string());
  cfg.set("svg", svg ? "true" : "false");
  physics.write_config(cfg);
  return cfg;
}

void ExperimentConfig::validate() const {
  physics.validate();
  train.validate();
  if (m < 2) throw DomainError("m must be >= 2 to form a train/dev split");
  if (seeds.empty()) throw DomainError("at least one seed is required");
  if (networks.empty()) throw DomainError("at least one network is required");
  for (const auto& n : networks) build_architecture(n);
  if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be >= 0");
}

NetworkSpec build_architecture(std::string_view selector) {
  const std::string sel = trim(selector);
  if (sel.rfind("spec:", 0) == 0) return NetworkSpec::load(sel.substr(5));

  NetworkSpec spec;
  spec.input_dim = static_cast<int>(physics::kNumFrequencies);
  const Branch joint{"joint", {}, {Target::kO2, Target::kT}, 0.3};
  const Branch o2{"o2", {kTaskWidth, kTaskWidth}, {Target::kO2}, 5.0};
  const Branch t{"t", {kTaskWidth, kTaskWidth}, {Target::kT}, 1.0};
  if (sel.size() >= 2 && (sel[0] == 'a' || sel[0] == 'A')) {
    int width = 0;
    try {
      width = static_cast<int>(parse_int(sel.substr(1)));
    } catch (const FormatError&) {
      throw FormatError("unknown network selector '" + sel + "'");
    }
    if (width != 10 && width != 30 && width != 50 && width != 80) {
      throw FormatError("network A supports 10, 30, 50 or 80 neurons, got '" + sel + "'");
    }
    spec.trunk = {width, width, width};
    spec.branches = {Branch{"joint", {}, {Target::kO2, Target::kT}, 1.0}};
  } else if (sel == "b" || sel == "B") {
    spec.trunk = {kSharedWidth, kSharedWidth, kSharedWidth};
    spec.branches = {o2, joint};
  } else if (sel == "c" || sel == "C") {
    spec.trunk = {kSharedWidth, kSharedWidth, kSharedWidth};
    spec.branches = {o2, t, joint};
  } else {
    throw FormatError("unknown network selector '" + sel + "'");
  }
  spec.validate();
  return spec;
}

void apply_loss_weights(NetworkSpec& spec, const LossWeights& alphas) {
  for (auto& br : spec.branches) {
    if (br.name == "joint") br.loss_weight = alphas[0];
    else if (br.name == "o2") br.loss_weight = alphas[1];
    else if (br.name == "t") br.loss_weight = alphas[2];
  }
  spec.validate();
}

PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto full = dataset::generate(cfg.physics, cfg.m, seed, cfg.noise_sigma);
  auto [train, dev] = dataset::split(full, cfg.train_fraction, seed);
  PreparedData d;
  d.train_x = train.feature_matrix();
  d.train_y = dataset::normalize_targets(train).values;
  d.dev_x = dev.feature_matrix();
  d.dev_y = dataset::normalize_targets(dev).values;
  d.train = std::move(train);
  d.dev = std::move(dev);
  return d;
}

RunSummary run_single(const ExperimentConfig& cfg, const NetworkSpec& spec, const std::string& label,
                      std::uint64_t seed, const PreparedData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  spec.save(dir / "spec.txt");

  const auto start = std::chrono::steady_clock::now();
  auto params = network::build(spec, seed);
  std::optional<optimizer::DevSet> dev;
  if (cfg.train.dev_every > 0) dev.emplace(optimizer::DevSet{data.dev_x, data.dev_y});
  auto result = optimizer::train(spec, std::move(params), data.train_x, data.train_y, cfg.train, dev);

  network::save_checkpoint(dir / "checkpoint.txt", result.params);
  result.trace.write_csv(dir / "trace.csv", spec);

  RunSummary s;
  s.network = label;
  s.seed = seed;
  s.dir = dir;
  s.initial_loss = result.trace.global_loss.front();
  s.final_loss = network::loss(spec, network::forward(spec, result.params, data.train_x), data.train_y).global;

  const auto pred_train = make_predictions(data.train, network::predict(spec, result.params, data.train_x));
  const auto pred_dev = make_predictions(data.dev, network::predict(spec, result.params, data.dev_x));
  metrics::write_predictions(pred_train, dir / "predictions_train.csv");
  metrics::write_predictions(pred_dev, dir / "predictions_dev.csv");
  const auto rep_train = report_from(pred_train, label, "train", seed);
  const auto rep_dev = report_from(pred_dev, label, "dev", seed);
  metrics::write_report(rep_train, dir / "train");
  metrics::write_report(rep_dev, dir / "dev");
  if (cfg.svg) {
    write_svgs(rep_train, dir / "train");
    write_svgs(rep_dev, dir / "dev");
  }
  s.mae_o2_train = rep_train.o2.mae;
  s.mae_t_train = rep_train.temp.mae;
  s.mae_o2_dev = rep_dev.o2.mae;
  s.mae_t_dev = rep_dev.temp.mae;

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "[%s seed=%llu] loss %.3e -> %.3e  dev MAE O2 %.3f %% air, T %.3f degC  (%.1f s)\n",
               label.c_str(), static_cast<unsigned long long>(seed), s.initial_loss, s.final_loss,
               s.mae_o2_dev, s.mae_t_dev, secs);
  return s;
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  cfg.to_config().save(cfg.out_dir / "config.txt");
  std::vector<RunSummary> runs;
  for (const auto seed : cfg.seeds) {
    const PreparedData data = prepare_data(cfg, seed);
    for (const auto& label : cfg.networks) {
      auto spec = build_architecture(label);
      if (cfg.alphas) apply_loss_weights(spec, *cfg.alphas);
      const auto dir = cfg.out_dir / label / ("seed_" + std::to_string(seed));
      runs.push_back(run_single(cfg, spec, label, seed, data, dir));
      write_compare_csv(runs, cfg.out_dir / "compare.csv");
    }
  }
  write_summary_csv(runs, cfg.out_dir / "compare_summary.csv");
  return runs;
}

std::vector<LossWeights> default_sweep_grid() {
  return {{0.3, 5.0, 5.0}, {0.3, 5.0, 15.0}, {0.3, 5.0, 25.0},
          {0.3, 1.0, 5.0}, {0.3, 15.0, 5.0}, {0.3, 25.0, 5.0}};
}

std::vector<SweepRow> weight_sweep(const ExperimentConfig& cfg, const std::vector<LossWeights>& grid) {
  cfg.validate();
  if (grid.empty()) throw DomainError("weight sweep needs at least one grid point");
  const std::string label = cfg.networks.front();
  const NetworkSpec base = build_architecture(label);
  if (base.branches.size() != 3) {
    throw DomainError("weight sweep needs a three-branch network, got '" + label + "'");
  }
  std::filesystem::create_directories(cfg.out_dir);
  cfg.to_config().save(cfg.out_dir / "config.txt");

  std::vector<SweepRow> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) rows[g].alphas = grid[g];
  for (const auto seed : cfg.seeds) {
    const PreparedData data = prepare_data(cfg, seed);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      NetworkSpec spec = base;
      apply_loss_weights(spec, grid[g]);
      const auto dir = cfg.out_dir / "sweep" / alpha_tag(grid[g]) / ("seed_" + std::to_string(seed));
      rows[g].runs.push_back(run_single(cfg, spec, label, seed, data, dir));
    }
  }

  std::ofstream table(cfg.out_dir / "sweep.csv");
  std::ofstream detail(cfg.out_dir / "sweep_runs.csv");
  if (!table || !detail) throw FormatError("cannot write sweep tables in " + cfg.out_dir.string());
  table << "alpha1,alpha2,alpha3,mae_o2,mae_t\n";
  detail << "alpha1,alpha2,alpha3,seed,mae_o2_dev,mae_t_dev,initial_loss,final_loss\n";
  for (auto& row : rows) {
    for (const auto& r : row.runs) {
      row.mae_o2 += r.mae_o2_dev;
      row.mae_t += r.mae_t_dev;
      detail << format_double(row.alphas[0]) << ',' << format_double(row.alphas[1]) << ','
             << format_double(row.alphas[2]) << ',' << r.seed << ',' << format_double(r.mae_o2_dev)
             << ',' << format_double(r.mae_t_dev) << ',' << format_double(r.initial_loss) << ','
             << format_double(r.final_loss) << '\n';
    }
    row.mae_o2 /= static_cast<double>(row.runs.size());
    row.mae_t /= static_cast<double>(row.runs.size());
    table << format_double(row.alphas[0]) << ',' << format_double(row.alphas[1]) << ','
          << format_double(row.alphas[2]) << ',' << format_double(row.mae_o2) << ','
          << format_double(row.mae_t) << '\n';
  }
  return rows;
}

std::vector<metrics::EvalReport> recompute_reports(const std::filesystem::path& run_dir,
                                                   const std::filesystem::path& out_dir) {
  std::vector<metrics::EvalReport> out;
  for (const std::string tag : {"train", "dev"}) {
    const auto path = run_dir / ("predictions_" + tag + ".csv");
    if (!std::filesystem::exists(path)) continue;
    const auto preds = metrics::read_predictions(path);
    std::string label = run_dir.parent_path().filename().string();
    std::uint64_t seed = 0;
    const auto leaf = run_dir.filename().string();
    if (leaf.rfind("seed_", 0) == 0) seed = static_cast<std::uint64_t>(parse_int(leaf.substr(5)));
    else label = leaf;
    auto rep = report_from(preds, label, tag, seed);
    metrics::write_report(rep, out_dir / tag);
    out.push_back(std::move(rep));
  }
  if (out.empty()) throw FormatError("no predictions_*.csv found in " + run_dir.string());
  return out;
}

std::string format_compare_table(const std::vector<RunSummary>& runs) {
  std::ostringstream ss;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %5s %16s %14s\n", "network", "runs", "MAE_O2 [% air]",
                "MAE_T [degC]");
  ss << line;
  for (const auto& [name, m] : mean_by_network(runs)) {
    std::snprintf(line, sizeof(line), "%-10s %5zu %16.3f %14.3f\n", name.c_str(), m.count, m.o2_dev,
                  m.t_dev);
    ss << line;
  }
  return ss.str();
}

}  // namespace mtlo2::harness
