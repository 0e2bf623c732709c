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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

/// Absolute errors in physical units and their summaries: MAE, per-bin
/// five-number boxplot statistics and Gaussian kernel density estimates.
namespace mtlo2::metrics {

/// AE[j] = |pred[j] - meas[j]|. Throws ShapeError on a length mismatch.
std::vector<double> absolute_errors(std::span<const double> pred, std::span<const double> meas);

/// Arithmetic mean. Throws DomainError on an empty list.
double mean_absolute_error(std::span<const double> ae);

/// Linear interpolation between order statistics ("type 7"):
/// h = (n - 1) p, q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
double quantile_sorted(std::span<const double> sorted, double p);

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumber five_number_summary(std::span<const double> values);

struct BinStats {
  std::string label;
  std::size_t count = 0;
  std::optional<FiveNumber> stats;  // empty bins carry no statistics
};

/// Groups `ae` by `bin_of` (indices into `labels`) and summarizes each bin.
std::vector<BinStats> binned_boxplot(std::span<const double> ae, std::span<const std::size_t> bin_of,
                                     std::span<const std::string> labels);

inline constexpr std::size_t kNumO2Bins = 10;

/// [0,10), [10,20), ..., [90,100]; the last bin is closed.
std::vector<std::size_t> o2_bins(std::span<const double> o2);
std::vector<std::string> o2_bin_labels();

/// Index of each temperature in {5, 15, 25, 35, 45}; other values throw.
std::vector<std::size_t> temperature_bins(std::span<const double> temps);
std::vector<std::string> temperature_bin_labels();

/// Scott's rule in one dimension: h = s * n^(-1/5), s the sample standard
/// deviation (n - 1 denominator). Throws DomainError for n < 2 or s == 0.
double scott_bandwidth(std::span<const double> samples);

/// density(x) = 1/(n h) sum_j phi((x - x_j) / h) with Scott's bandwidth.
std::vector<double> kde(std::span<const double> samples, std::span<const double> grid);
std::vector<double> kde(std::span<const double> samples, std::span<const double> grid,
                        double bandwidth);

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr std::size_t kKdeGridPoints = 512;

/// Uniform grid over [min - 5h, max + 5h] with at least `min_points` points,
/// refined until the spacing is <= h/2.
KdeCurve kde_curve(std::span<const double> samples, std::size_t min_points = kKdeGridPoints);

double trapezoid(std::span<const double> x, std::span<const double> y);

struct TargetReport {
  std::vector<double> ae;
  double mae = 0.0;
  std::vector<BinStats> bins;
  std::optional<KdeCurve> kde;  // empty when every AE is identical
};

struct EvalReport {
  std::string network;
  std::string dataset_tag;
  std::uint64_t seed = 0;
  TargetReport o2;    // % air, binned by true O2 decade
  TargetReport temp;  // degC, binned by true temperature level
};

/// Inputs are in physical units.
EvalReport evaluate(std::string network, std::string dataset_tag, std::uint64_t seed,
                    std::span<const double> true_o2, std::span<const double> true_temp,
                    std::span<const double> pred_o2, std::span<const double> pred_temp);

nlohmann::json to_json(const EvalReport& report);

/// Writes report.json, bins_o2.csv, bins_t.csv, kde_o2.csv and kde_t.csv into `dir`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

struct Predictions {
  std::vector<double> true_o2;
  std::vector<double> true_temp;
  std::vector<double> pred_o2;
  std::vector<double> pred_temp;
};

/// Header `o2_true,temp_true,o2_pred,temp_pred`; values round-trip exactly.
void write_predictions(const Predictions& p, const std::filesystem::path& path);
Predictions read_predictions(const std::filesystem::path& path);

}  // namespace mtlo2::metrics
