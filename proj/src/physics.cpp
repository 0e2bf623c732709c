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

#include "mtlo2/physics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mtlo2/errors.hpp"

namespace mtlo2::physics {
namespace {

double linear_law(double ref, double tc, double temp, double t_ref) {
  return ref * (1.0 + tc * (temp - t_ref));
}

double log_omega_tau(const PhysicsParams& p, double omega, double temp) {
  return std::log(omega * tau0(p, temp));
}

void check_inputs(double omega, double temp, double o2) {
  if (!(o2 >= 0.0) || !std::isfinite(o2)) {
    throw DomainError("oxygen concentration must be finite and >= 0, got " +
                      std::to_string(o2));
  }
  if (!(temp >= kMinTemperature && temp <= kMaxTemperature)) {
    throw DomainError("temperature outside supported range [5, 45] degC: " +
                      std::to_string(temp));
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("angular frequency must be positive");
  }
}

}  // namespace

std::vector<double> default_omegas() {
  const double lo = std::log(500.0);
  const double hi = std::log(20000.0);
  std::vector<double> out(kNumFrequencies);
  for (std::size_t i = 0; i < kNumFrequencies; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(kNumFrequencies - 1);
    out[i] = 2.0 * std::numbers::pi * std::exp(lo + t * (hi - lo));
  }
  return out;
}

PhysicsParams PhysicsParams::defaults() {
  PhysicsParams p;
  p.omegas = default_omegas();
  return p;
}

double tau0(const PhysicsParams& p, double temp) {
  return linear_law(p.tau0_ref, p.tau0_tc, temp, p.t_ref);
}

double fraction(const PhysicsParams& p, double omega, double temp) {
  return linear_law(p.f_ref, p.f_tc, temp, p.t_ref) *
         (1.0 + p.f_wc * log_omega_tau(p, omega, temp));
}

double ksv1(const PhysicsParams& p, double omega, double temp) {
  return linear_law(p.ksv1_ref, p.ksv1_tc, temp, p.t_ref) *
         (1.0 + p.ksv1_wc * log_omega_tau(p, omega, temp));
}

double ksv2(const PhysicsParams& p, double omega, double temp) {
  return linear_law(p.ksv2_ref, p.ksv2_tc, temp, p.t_ref) *
         (1.0 + p.ksv2_wc * log_omega_tau(p, omega, temp));
}

double tan_theta0(const PhysicsParams& p, double omega, double temp) {
  return omega * tau0(p, temp);
}

double tan_theta_ratio(const PhysicsParams& p, double omega, double temp, double o2) {
  check_inputs(omega, temp, o2);
  if (!(tau0(p, temp) > 0.0)) throw DomainError("tau0(T) must be positive");
  const double f = fraction(p, omega, temp);
  if (!(f > 0.0 && f <= 1.0)) {
    throw DomainError("unquenched fraction f outside (0, 1]: " + std::to_string(f));
  }
  const double q1 = ksv1(p, omega, temp) * o2;
  const double q2 = ksv2(p, omega, temp) * o2;
  return 1.0 - f * (q1 / (1.0 + q1)) - (1.0 - f) * (q2 / (1.0 + q2));
}

Features feature_vector(const PhysicsParams& p, double temp, double o2) {
  if (p.omegas.size() != kNumFrequencies) {
    throw DomainError("expected 16 modulation frequencies");
  }
  Features r{};
  for (std::size_t i = 0; i < kNumFrequencies; ++i) {
    r[i] = tan_theta_ratio(p, p.omegas[i], temp, o2);
  }
  return r;
}

void PhysicsParams::validate() const {
  if (omegas.size() != kNumFrequencies) {
    throw DomainError("expected 16 modulation frequencies, got " +
                      std::to_string(omegas.size()));
  }
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || !std::isfinite(omegas[i])) {
      throw DomainError("modulation frequencies must be positive and finite");
    }
    if (i > 0 && !(omegas[i - 1] < omegas[i])) {
      throw DomainError("modulation frequencies must be strictly increasing");
    }
  }
  // The laws are smooth in T; a 0.5 degC grid over the supported range is
  // dense enough to catch a sign change of any linear or product term.
  for (int k = 0; k <= 80; ++k) {
    const double temp = kMinTemperature + 0.5 * k;
    if (!(tau0(*this, temp) > 0.0)) throw DomainError("tau0(T) <= 0 at T=" + std::to_string(temp));
    for (const double w : omegas) {
      const double f = fraction(*this, w, temp);
      const double k1 = ksv1(*this, w, temp);
      const double k2 = ksv2(*this, w, temp);
      if (!(f > 0.0 && f <= 1.0)) {
        throw DomainError("f outside (0, 1] at T=" + std::to_string(temp));
      }
      if (!(k2 >= 0.0)) throw DomainError("K_SV2 < 0 at T=" + std::to_string(temp));
      if (!(k1 >= k2)) throw DomainError("K_SV1 < K_SV2 at T=" + std::to_string(temp));
    }
  }
}

PhysicsParams PhysicsParams::from_config(const KeyValueConfig& cfg) {
  PhysicsParams p = defaults();
  if (cfg.contains("omegas")) p.omegas = cfg.get_doubles("omegas");
  p.tau0_ref = cfg.get_double("tau0_ref", p.tau0_ref);
  p.tau0_tc = cfg.get_double("tau0_tc", p.tau0_tc);
  p.f_ref = cfg.get_double("f_ref", p.f_ref);
  p.f_tc = cfg.get_double("f_tc", p.f_tc);
  p.ksv1_ref = cfg.get_double("ksv1_ref", p.ksv1_ref);
  p.ksv1_tc = cfg.get_double("ksv1_tc", p.ksv1_tc);
  p.ksv2_ref = cfg.get_double("ksv2_ref", p.ksv2_ref);
  p.ksv2_tc = cfg.get_double("ksv2_tc", p.ksv2_tc);
  p.t_ref = cfg.get_double("t_ref", p.t_ref);
  p.f_wc = cfg.get_double("f_wc", p.f_wc);
  p.ksv1_wc = cfg.get_double("ksv1_wc", p.ksv1_wc);
  p.ksv2_wc = cfg.get_double("ksv2_wc", p.ksv2_wc);
  p.validate();
  return p;
}

void PhysicsParams::write_config(KeyValueConfig& cfg) const {
  std::string list;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (i) list += ',';
    list += format_double(omegas[i]);
  }
  cfg.set("omegas", list);
  cfg.set("tau0_ref", format_double(tau0_ref));
  cfg.set("tau0_tc", format_double(tau0_tc));
  cfg.set("f_ref", format_double(f_ref));
  cfg.set("f_tc", format_double(f_tc));
  cfg.set("ksv1_ref", format_double(ksv1_ref));
  cfg.set("ksv1_tc", format_double(ksv1_tc));
  cfg.set("ksv2_ref", format_double(ksv2_ref));
  cfg.set("ksv2_tc", format_double(ksv2_tc));
  cfg.set("t_ref", format_double(t_ref));
  cfg.set("f_wc", format_double(f_wc));
  cfg.set("ksv1_wc", format_double(ksv1_wc));
  cfg.set("ksv2_wc", format_double(ksv2_wc));
}

PhysicsParams PhysicsParams::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

void PhysicsParams::save(const std::filesystem::path& path) const {
  KeyValueConfig cfg;
  write_config(cfg);
  cfg.save(path);
}

}  // namespace mtlo2::physics
