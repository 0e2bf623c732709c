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

#include "mtlo2/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "mtlo2/dataset.hpp"
#include "mtlo2/errors.hpp"
#include "mtlo2/kv_config.hpp"

namespace mtlo2::metrics {
namespace {

constexpr double kKdeCut = 5.0;

nlohmann::json bins_json(const std::vector<BinStats>& bins) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bins) {
    nlohmann::json j{{"bin", b.label}, {"count", b.count}};
    if (b.stats) {
      j["min"] = b.stats->min;
      j["q1"] = b.stats->q1;
      j["median"] = b.stats->median;
      j["q3"] = b.stats->q3;
      j["max"] = b.stats->max;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::json target_json(const TargetReport& t) {
  nlohmann::json j{{"mae", t.mae}, {"ae", t.ae}, {"bins", bins_json(t.bins)}};
  if (t.kde) {
    j["kde"] = {{"bandwidth", t.kde->bandwidth}, {"x", t.kde->x}, {"density", t.kde->density}};
  } else {
    j["kde"] = nullptr;
  }
  return j;
}

void write_bins_csv(const std::vector<BinStats>& bins, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "bin,count,min,q1,median,q3,max\n";
  for (const auto& b : bins) {
    out << b.label << ',' << b.count;
    if (b.stats) {
      out << ',' << format_double(b.stats->min) << ',' << format_double(b.stats->q1) << ','
          << format_double(b.stats->median) << ',' << format_double(b.stats->q3) << ','
          << format_double(b.stats->max);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

void write_kde_csv(const std::optional<KdeCurve>& kde, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "x,density\n";
  if (!kde) return;
  for (std::size_t i = 0; i < kde->x.size(); ++i) {
    out << format_double(kde->x[i]) << ',' << format_double(kde->density[i]) << '\n';
  }
}

TargetReport summarize(std::vector<double> ae, const std::vector<std::size_t>& bin_of,
                       const std::vector<std::string>& labels) {
  TargetReport t;
  t.mae = mean_absolute_error(ae);
  t.bins = binned_boxplot(ae, bin_of, labels);
  try {
    t.kde = kde_curve(ae);
  } catch (const DomainError&) {
    t.kde.reset();
  }
  t.ae = std::move(ae);
  return t;
}

}  // namespace

std::vector<double> absolute_errors(std::span<const double> pred, std::span<const double> meas) {
  if (pred.size() != meas.size()) throw ShapeError("prediction and measurement lengths differ");
  std::vector<double> ae(pred.size());
  for (std::size_t j = 0; j < pred.size(); ++j) ae[j] = std::abs(pred[j] - meas[j]);
  return ae;
}

double mean_absolute_error(std::span<const double> ae) {
  if (ae.empty()) throw DomainError("mean absolute error of an empty list");
  return std::accumulate(ae.begin(), ae.end(), 0.0) / static_cast<double>(ae.size());
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty list");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

FiveNumber five_number_summary(std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return FiveNumber{s.front(), quantile_sorted(s, 0.25), quantile_sorted(s, 0.5),
                    quantile_sorted(s, 0.75), s.back()};
}

std::vector<BinStats> binned_boxplot(std::span<const double> ae, std::span<const std::size_t> bin_of,
                                     std::span<const std::string> labels) {
  if (ae.size() != bin_of.size()) throw ShapeError("AE list and bin keys differ in length");
  std::vector<std::vector<double>> groups(labels.size());
  for (std::size_t j = 0; j < ae.size(); ++j) {
    if (bin_of[j] >= labels.size()) throw ShapeError("bin index out of range");
    groups[bin_of[j]].push_back(ae[j]);
  }
  std::vector<BinStats> out;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    BinStats s{labels[b], groups[b].size(), std::nullopt};
    if (!groups[b].empty()) s.stats = five_number_summary(groups[b]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::size_t> o2_bins(std::span<const double> o2) {
  std::vector<std::size_t> out(o2.size());
  for (std::size_t j = 0; j < o2.size(); ++j) {
    if (!(o2[j] >= 0.0 && o2[j] <= 100.0)) {
      throw DomainError("oxygen value outside [0, 100] % air");
    }
    out[j] = std::min<std::size_t>(static_cast<std::size_t>(o2[j] / 10.0), kNumO2Bins - 1);
  }
  return out;
}

std::vector<std::string> o2_bin_labels() {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < kNumO2Bins; ++b) {
    const auto lo = std::to_string(10 * b);
    const auto hi = std::to_string(10 * (b + 1));
    out.push_back(b + 1 == kNumO2Bins ? "[" + lo + "," + hi + "]" : "[" + lo + "," + hi + ")");
  }
  return out;
}

std::vector<std::size_t> temperature_bins(std::span<const double> temps) {
  const auto& levels = dataset::kTemperatureLevels;
  std::vector<std::size_t> out(temps.size());
  for (std::size_t j = 0; j < temps.size(); ++j) {
    const auto it = std::find(levels.begin(), levels.end(), temps[j]);
    if (it == levels.end()) {
      throw DomainError("temperature " + std::to_string(temps[j]) + " is not one of the five levels");
    }
    out[j] = static_cast<std::size_t>(it - levels.begin());
  }
  return out;
}

std::vector<std::string> temperature_bin_labels() {
  std::vector<std::string> out;
  for (const double t : dataset::kTemperatureLevels) out.push_back(std::to_string(static_cast<int>(t)));
  return out;
}

double scott_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("KDE needs at least two samples");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (const double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DomainError("KDE bandwidth collapsed: samples have zero variance");
  return sd * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> kde(std::span<const double> samples, std::span<const double> grid,
                        double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("KDE bandwidth must be positive");
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (const double s : samples) {
      const double u = (grid[g] - s) / bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out[g] = norm * acc;
  }
  return out;
}

std::vector<double> kde(std::span<const double> samples, std::span<const double> grid) {
  return kde(samples, grid, scott_bandwidth(samples));
}

KdeCurve kde_curve(std::span<const double> samples, std::size_t min_points) {
  KdeCurve c;
  c.bandwidth = scott_bandwidth(samples);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - kKdeCut * c.bandwidth;
  const double hi = *mx + kKdeCut * c.bandwidth;
  const auto needed = static_cast<std::size_t>(std::ceil((hi - lo) / (0.5 * c.bandwidth))) + 1;
  const std::size_t points = std::max({min_points, needed, std::size_t{2}});
  c.x.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    c.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  c.density = kde(samples, c.x, c.bandwidth);
  return c;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("trapezoid: x and y lengths differ");
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

EvalReport evaluate(std::string network, std::string dataset_tag, std::uint64_t seed,
                    std::span<const double> true_o2, std::span<const double> true_temp,
                    std::span<const double> pred_o2, std::span<const double> pred_temp) {
  EvalReport r;
  r.network = std::move(network);
  r.dataset_tag = std::move(dataset_tag);
  r.seed = seed;
  r.o2 = summarize(absolute_errors(pred_o2, true_o2), o2_bins(true_o2), o2_bin_labels());
  r.temp = summarize(absolute_errors(pred_temp, true_temp), temperature_bins(true_temp),
                     temperature_bin_labels());
  return r;
}

nlohmann::json to_json(const EvalReport& report) {
  return nlohmann::json{{"network", report.network},
                        {"dataset", report.dataset_tag},
                        {"seed", report.seed},
                        {"count", report.o2.ae.size()},
                        {"o2", target_json(report.o2)},
                        {"temperature", target_json(report.temp)}};
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw FormatError("cannot write report in " + dir.string());
    out << to_json(report).dump(1) << '\n';
  }
  write_bins_csv(report.o2.bins, dir / "bins_o2.csv");
  write_bins_csv(report.temp.bins, dir / "bins_t.csv");
  write_kde_csv(report.o2.kde, dir / "kde_o2.csv");
  write_kde_csv(report.temp.kde, dir / "kde_t.csv");
}

void write_predictions(const Predictions& p, const std::filesystem::path& path) {
  const std::size_t n = p.true_o2.size();
  if (p.true_temp.size() != n || p.pred_o2.size() != n || p.pred_temp.size() != n) {
    throw ShapeError("prediction columns differ in length");
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "o2_true,temp_true,o2_pred,temp_pred\n";
  for (std::size_t j = 0; j < n; ++j) {
    out << format_double(p.true_o2[j]) << ',' << format_double(p.true_temp[j]) << ','
        << format_double(p.pred_o2[j]) << ',' << format_double(p.pred_temp[j]) << '\n';
  }
}

Predictions read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "o2_true,temp_true,o2_pred,temp_pred") {
    throw FormatError(path.string() + ": unexpected predictions header");
  }
  Predictions p;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != 4) throw FormatError(path.string() + ": expected 4 columns");
    p.true_o2.push_back(parse_double(cells[0]));
    p.true_temp.push_back(parse_double(cells[1]));
    p.pred_o2.push_back(parse_double(cells[2]));
    p.pred_temp.push_back(parse_double(cells[3]));
  }
  return p;
}

}  // namespace mtlo2::metrics
