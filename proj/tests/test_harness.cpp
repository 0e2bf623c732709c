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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mtlo2/errors.hpp"
#include "mtlo2/harness.hpp"

using namespace mtlo2;
using namespace mtlo2::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.m = 100;
  cfg.train.epochs = 3;
  cfg.seeds = {5};
  cfg.networks = {"c"};
  cfg.out_dir = out;
  return cfg;
}

const network::Branch* find_branch(const network::NetworkSpec& spec, const std::string& name) {
  for (const auto& b : spec.branches) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("architectures") {
  const auto a50 = build_architecture("a50");
  CHECK(a50.parameter_count() == 6052);
  CHECK(a50.branches.size() == 1);
  CHECK(build_architecture("A30").trunk == std::vector<int>{30, 30, 30});
  CHECK(build_architecture("b").branches.size() == 2);

  const auto c = build_architecture("c");
  REQUIRE(c.branches.size() == 3);
  CHECK(find_branch(c, "o2")->hidden == std::vector<int>{5, 5});
  CHECK(find_branch(c, "o2")->loss_weight == 5.0);
  CHECK(find_branch(c, "joint")->loss_weight == 0.3);
  CHECK(find_branch(c, "t")->loss_weight == 1.0);

  CHECK_THROWS_AS(build_architecture("a7"), FormatError);
  CHECK_THROWS_AS(build_architecture("spec:/nonexistent/spec.txt"), FormatError);
}

TEST_CASE("spec selector loads a file") {
  const auto path = fs::temp_directory_path() / "mtlo2_arch_spec.txt";
  build_architecture("b").save(path);
  CHECK(build_architecture("spec:" + path.string()).parameter_count() ==
        build_architecture("b").parameter_count());
  fs::remove(path);
}

TEST_CASE("loss weights map by branch name") {
  auto c = build_architecture("c");
  apply_loss_weights(c, {0.1, 2.0, 3.0});
  CHECK(find_branch(c, "joint")->loss_weight == 0.1);
  CHECK(find_branch(c, "o2")->loss_weight == 2.0);
  CHECK(find_branch(c, "t")->loss_weight == 3.0);
}

TEST_CASE("six-row default sweep grid") {
  const auto g = default_sweep_grid();
  CHECK(g.size() == 6);
  for (const auto& row : g) CHECK(row[0] >= 0.0);
}

TEST_CASE("config apply and round-trip") {
  ExperimentConfig cfg;
  CHECK(cfg.m == 25000);
  CHECK(cfg.train.epochs == 4000);

  ExperimentConfig desk;
  desk.apply(KeyValueConfig::parse("desk = true\nepochs = 20\nseeds = 1,2,3\nnetworks = a30,c\n"));
  CHECK(desk.m == 5000);
  CHECK(desk.train.epochs == 20);
  CHECK(desk.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(desk.networks == std::vector<std::string>{"a30", "c"});

  ExperimentConfig back;
  back.apply(desk.to_config());
  CHECK(back.m == desk.m);
  CHECK(back.train.epochs == desk.train.epochs);
  CHECK(back.seeds == desk.seeds);
  CHECK(back.physics.f_wc == desk.physics.f_wc);

  ExperimentConfig bad;
  bad.apply(KeyValueConfig::parse("m = 1\n"));
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(bad.apply(KeyValueConfig::parse("no_such_key = 1\n")), FormatError);
}

TEST_CASE("prepared data is shared across networks") {
  ExperimentConfig cfg;
  cfg.m = 50;
  const auto a = prepare_data(cfg, 2);
  const auto b = prepare_data(cfg, 2);
  CHECK(a.train.size() == 40);
  CHECK(a.dev.size() == 10);
  CHECK(a.train_x == b.train_x);
  CHECK(a.dev_y == b.dev_y);
}

TEST_CASE("smoke run writes well-formed reports") {
  const auto out = fs::temp_directory_path() / "mtlo2_harness_smoke";
  fs::remove_all(out);
  const auto runs = run_experiment(tiny_config(out));
  REQUIRE(runs.size() == 1);
  const auto dir = out / "c" / "seed_5";
  for (const char* f : {"spec.txt", "checkpoint.txt", "trace.csv", "predictions_train.csv",
                        "predictions_dev.csv", "train/report.json", "dev/report.json"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(fs::exists(out / "compare.csv"));
  CHECK(fs::exists(out / "config.txt"));

  const auto j = nlohmann::json::parse(slurp(dir / "dev" / "report.json"));
  CHECK(j["count"].get<std::size_t>() == 20);
  CHECK(j["o2"]["ae"].size() == 20);
  CHECK(j["o2"]["bins"].size() == 10);
  CHECK(j["temperature"]["bins"].size() == 5);
  CHECK(j["o2"]["mae"].get<double>() == doctest::Approx(runs[0].mae_o2_dev));

  SUBCASE("reports can be recomputed from predictions") {
    const auto again = recompute_reports(dir, out / "recomputed");
    REQUIRE(again.size() == 2);
    CHECK(again[1].o2.mae == doctest::Approx(runs[0].mae_o2_dev).epsilon(1e-12));
    CHECK(again[1].temp.mae == doctest::Approx(runs[0].mae_t_dev).epsilon(1e-12));
  }
  CHECK(format_compare_table(runs).find("c") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("identical config gives byte-identical predictions") {
  const auto out1 = fs::temp_directory_path() / "mtlo2_det_1";
  const auto out2 = fs::temp_directory_path() / "mtlo2_det_2";
  run_experiment(tiny_config(out1));
  run_experiment(tiny_config(out2));
  for (const char* f : {"predictions_train.csv", "predictions_dev.csv", "checkpoint.txt"}) {
    const auto a = slurp(out1 / "c" / "seed_5" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(out2 / "c" / "seed_5" / f));
  }
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("single-row sweep") {
  const auto out = fs::temp_directory_path() / "mtlo2_sweep";
  fs::remove_all(out);
  const auto rows = weight_sweep(tiny_config(out), {{0.3, 5.0, 1.0}});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].runs.size() == 1);
  const auto csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("alpha1,alpha2,alpha3,mae_o2,mae_t\n", 0) == 0);

  auto a = tiny_config(out);
  a.networks = {"a30"};
  CHECK_THROWS(weight_sweep(a, {{1.0, 1.0, 1.0}}));
  fs::remove_all(out);
}
