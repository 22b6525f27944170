// Copyright 2026 The sbb Authors.
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

// Shared fixtures, oracles and hand-rolled generators for the test suites.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sbb/analytic.hpp"
#include "sbb/core.hpp"

namespace sbb::test {

/// 87Rb in a 20 Hz trap moved over 1 cm.
inline TransportSpec reference_spec() {
  TransportSpec s;
  s.omega0 = 2.0 * kPi * 20.0;
  s.distance = 0.01;
  return s;
}

struct Ratios {
  double delta;
  std::optional<double> epsilon;
  std::optional<double> zeta;
};

inline ConstraintSet from_ratios(const TransportSpec& s, const Ratios& r) {
  return constraints_from_ratios(s, r.delta, r.epsilon, r.zeta);
}

/// Deterministic draws over the property grid
/// delta/d in [0.02, 0.3], epsilon/(d w0) in [0.02, 0.4], zeta/(d w0^2) in [0.2, 4].
class RatioGenerator {
 public:
  explicit RatioGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Ratios any() { return {uniform(0.02, 0.3), uniform(0.02, 0.4), uniform(0.2, 4.0)}; }

  /// Draws until the acceleration-bounded schedule is strictly ordered.
  Ratios valid_acc(const TransportSpec& s) {
    for (;;) {
      const Ratios r = any();
      const auto c = from_ratios(s, r);
      if (analytic::acc_bounded_regime_valid(s, c.delta, *c.epsilon, *c.zeta)) return r;
    }
  }

  /// Draws until the velocity-bounded regime t_f >= 4 delta / epsilon holds.
  Ratios valid_vel(const TransportSpec& s) {
    for (;;) {
      Ratios r = any();
      r.zeta.reset();
      const auto c = from_ratios(s, r);
      if (analytic::vel_bounded_time(s, c.delta, *c.epsilon) >= 4.0 * c.delta / *c.epsilon) return r;
    }
  }

 private:
  std::mt19937_64 rng_;
};

/// Uniform grid of n points over [0, t_f], endpoints included.
inline std::vector<double> grid(double t_f, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_f * i / (n - 1);
  t.back() = t_f;
  return t;
}

/// Central difference of a scalar function.
template <class F>
double central_diff(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace sbb::test
