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
#include <filesystem>
#include <vector>

#include "mtlo2/kv_config.hpp"

/// Two-site Stern-Volmer phase-shift model producing the 16 r-ratio
/// features of a frequency-domain luminescence oxygen sensor.
namespace mtlo2::physics {

inline constexpr std::size_t kNumFrequencies = 16;
inline constexpr double kMinTemperature = 5.0;
inline constexpr double kMaxTemperature = 45.0;

using Features = std::array<double, kNumFrequencies>;

/// Parametrization of the quenching model.
///
/// Temperature laws are linear in (T - t_ref):
///   tau0(T)  = tau0_ref * (1 + tau0_tc * (T - t_ref))
///   f(T)     = f_ref    * (1 + f_tc    * (T - t_ref))
///   K_SVi(T) = ksvi_ref * (1 + ksvi_tc * (T - t_ref))
///
/// Frequency enters through g = ln(omega * tau0(T)):
///   f(omega, T)     = f(T)     * (1 + f_wc    * g)
///   K_SVi(omega, T) = K_SVi(T) * (1 + ksvi_wc * g)
///
/// Setting every `*_wc` to zero gives frequency-independent f and K_SV, in
/// which case all sixteen features coincide.
struct PhysicsParams {
  std::vector<double> omegas;  // rad/s, strictly increasing, 16 entries
  double tau0_ref = 30e-6;     // s
  double tau0_tc = -0.02;      // 1/degC
  double f_ref = 0.85;
  double f_tc = -0.002;        // 1/degC
  double ksv1_ref = 0.06;      // 1/(% air)
  double ksv1_tc = 0.01;       // 1/degC
  double ksv2_ref = 0.006;     // 1/(% air)
  double ksv2_tc = 0.01;       // 1/degC
  double t_ref = 25.0;         // degC
  double f_wc = -0.05;
  double ksv1_wc = 0.3;
  double ksv2_wc = 0.0;

  /// Defaults with 16 log-spaced frequencies from 2*pi*500 to 2*pi*20000 rad/s.
  static PhysicsParams defaults();

  /// Throws DomainError unless the frequency set and the parameter laws
  /// satisfy tau0 > 0, f in (0,1], K_SV1 >= K_SV2 >= 0 over T in [5, 45].
  void validate() const;

  static PhysicsParams from_config(const KeyValueConfig& cfg);
  void write_config(KeyValueConfig& cfg) const;
  static PhysicsParams load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

std::vector<double> default_omegas();

double tau0(const PhysicsParams& p, double temp);
double fraction(const PhysicsParams& p, double omega, double temp);
double ksv1(const PhysicsParams& p, double omega, double temp);
double ksv2(const PhysicsParams& p, double omega, double temp);

/// tan(theta0) = omega * tau0(T), the unquenched phase tangent.
double tan_theta0(const PhysicsParams& p, double omega, double temp);

/// r = tan(theta(omega, T, O2)) / tan(theta(omega, T, 0)), in (0, 1].
///
/// Evaluated as 1 - f*K1*c/(1+K1*c) - (1-f)*K2*c/(1+K2*c), which is
/// algebraically the two-site sum and returns exactly 1 at c = 0.
/// Throws DomainError for o2 < 0, T outside [5, 45], omega <= 0 or f outside (0,1].
double tan_theta_ratio(const PhysicsParams& p, double omega, double temp, double o2);

/// One r-ratio per entry of `p.omegas`.
Features feature_vector(const PhysicsParams& p, double temp, double o2);

}  // namespace mtlo2::physics
