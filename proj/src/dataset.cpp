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

#include "mtlo2/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "mtlo2/errors.hpp"
#include "mtlo2/kv_config.hpp"
#include "mtlo2/rng.hpp"

namespace mtlo2 {

namespace dataset {
namespace {

constexpr std::uint64_t kGenerateStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSplitStream = 3;

std::string csv_header() {
  std::string h;
  for (std::size_t i = 1; i <= physics::kNumFrequencies; ++i) {
    h += 'r' + std::to_string(i) + ',';
  }
  return h + "o2_pct_air,temp_c";
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows, SplitTag tag) {
  Dataset out;
  out.tag = tag;
  out.scaling = ds.scaling;
  out.observations.reserve(rows.size());
  out.source_index.reserve(rows.size());
  for (const auto r : rows) {
    out.observations.push_back(ds.observations[r]);
    out.source_index.push_back(ds.source_index[r]);
  }
  return out;
}

}  // namespace

const char* split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kDev: return "dev";
    case SplitTag::kFull: break;
  }
  return "full";
}

Eigen::MatrixXd Dataset::feature_matrix() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(size()),
                    static_cast<Eigen::Index>(physics::kNumFrequencies));
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t i = 0; i < physics::kNumFrequencies; ++i) {
      x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = observations[j].features[i];
    }
  }
  return x;
}

Dataset generate(const physics::PhysicsParams& params, std::size_t m, std::uint64_t seed,
                 double noise_sigma) {
  if (m == 0) throw DomainError("dataset size m must be >= 1");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be >= 0");
  params.validate();

  Rng rng(seed, kGenerateStream);
  Rng noise(seed, kNoiseStream);
  Dataset ds;
  ds.observations.resize(m);
  ds.source_index.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    Observation& obs = ds.observations[j];
    obs.o2 = 100.0 * rng.uniform01();
    obs.temp = kTemperatureLevels[rng.below(kTemperatureLevels.size())];
    obs.features = physics::feature_vector(params, obs.temp, obs.o2);
    if (noise_sigma > 0.0) {
      for (auto& r : obs.features) r += noise_sigma * noise.normal();
    }
    ds.source_index[j] = j;
  }
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train_fraction must lie in (0, 1)");
  }
  const std::size_t m = ds.size();
  // The small offset keeps e.g. 0.29 * 100 from flooring to 28.
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m) + 1e-9));
  if (n_train == 0 || n_train >= m) {
    throw DomainError("split would leave a partition empty (m=" + std::to_string(m) + ")");
  }

  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed, kSplitStream);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  const std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<std::size_t> dev_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {subset(ds, train_rows, SplitTag::kTrain), subset(ds, dev_rows, SplitTag::kDev)};
}

NormalizedTargets normalize_targets(const Dataset& ds) {
  NormalizedTargets out;
  out.scaling = ds.scaling;
  out.values.resize(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(kNumTargets));
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    out.values(row, static_cast<int>(Target::kO2)) = ds.scaling.normalize_o2(ds.observations[j].o2);
    out.values(row, static_cast<int>(Target::kT)) = ds.scaling.normalize_temp(ds.observations[j].temp);
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << csv_header() << '\n';
  for (const auto& obs : ds.observations) {
    for (const double r : obs.features) out << format_double(r) << ',';
    out << format_double(obs.o2) << ',' << format_double(obs.temp) << '\n';
  }
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != csv_header()) {
    throw FormatError(path.string() + ": unexpected CSV header");
  }
  Dataset ds;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != physics::kNumFrequencies + 2) {
      throw FormatError(path.string() + ": row " + std::to_string(ds.size() + 1) +
                        " has " + std::to_string(cells.size()) + " columns");
    }
    Observation obs;
    for (std::size_t i = 0; i < physics::kNumFrequencies; ++i) obs.features[i] = parse_double(cells[i]);
    obs.o2 = parse_double(cells[physics::kNumFrequencies]);
    obs.temp = parse_double(cells[physics::kNumFrequencies + 1]);
    ds.source_index.push_back(ds.size());
    ds.observations.push_back(obs);
  }
  return ds;
}

}  // namespace dataset
}  // namespace mtlo2
