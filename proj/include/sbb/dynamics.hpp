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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "sbb/core.hpp"
#include "sbb/errors.hpp"

namespace sbb::dynamics {

/// (qc, qc') and, for extended systems, higher derivatives.
template <std::size_t N>
using State = std::array<double, N>;

/// Classical fixed-step RK4. Returns steps + 1 states including x0.
/// `deriv(t, x)` must return std::array<T, N>; T is any floating-point-like
/// scalar (double in the library, wider types in accuracy studies).
template <class T, std::size_t N, class Deriv>
std::vector<std::array<T, N>> rk4_integrate(Deriv&& deriv, const std::array<T, N>& x0, T t0,
                                            T t1, int steps) {
  using Vec = std::array<T, N>;
  if (steps < 1) throw DomainError("steps", "must be >= 1");
  if (!(t1 > t0)) throw DomainError("t1", "must exceed t0");
  const T h = (t1 - t0) / steps;
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(x0);
  Vec x = x0;
  auto axpy = [](const Vec& a, const T& s, const Vec& b) {
    Vec r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const T half = h / 2;
  for (int j = 0; j < steps; ++j) {
    const T t = t0 + j * h;
    const Vec k1 = deriv(t, x);
    const Vec k2 = deriv(t + half, axpy(x, half, k1));
    const Vec k3 = deriv(t + half, axpy(x, half, k2));
    const Vec k4 = deriv(t + h, axpy(x, h, k3));
    for (std::size_t i = 0; i < N; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    out.push_back(x);
  }
  return out;
}

struct TrajectoryPoint {
  double t;
  double qc;
  double qc_dot;
};

/// Forward RK4 of qc'' = -omega0^2 (qc - q0(t)) from rest at the origin under
/// the protocol's trap trajectory. Steps are distributed over the segments so
/// that every breakpoint is a step boundary; each segment is integrated with
/// its own polynomial, so controller jumps never fall inside a stage.
std::vector<TrajectoryPoint> integrate_auxiliary(const Protocol& p, int steps = 10000);

struct BoundaryResidual {
  std::string name;
  double value = 0.0;      // absolute, SI
  double tolerance = 0.0;  // absolute, SI
  bool required = true;

  bool passed() const { return !required || std::abs(value) <= tolerance; }
};

struct EnergySample {
  double t;
  double energy;  // J
};

struct MetricsReport {
  double avg_potential_energy = 0.0;  // J
  double sloshing_amplitude = 0.0;    // m
  double final_excess_energy = 0.0;   // J, relative to hbar*omega0*(n + 1/2)
  double final_position = 0.0;        // RK4 qc(t_f), m
  double final_velocity = 0.0;        // RK4 qc'(t_f), m/s
  int mode = 0;
  std::vector<BoundaryResidual> boundary_residuals;
  std::vector<EnergySample> energy_trace;

  bool passed() const;
};

struct VerifyOptions {
  int steps = 10000;
  int mode = 0;
  int trace_samples = 1001;
  int slosh_panels = 1 << 16;
};

MetricsReport verify_protocol(const Protocol& p, const VerifyOptions& options = {});

/// (1/t_f) * integral of (m/2) omega0^2 u^2. Exact for analytic kinds,
/// composite Simpson (>= 1e4 panels) for Numerical.
double avg_potential_energy(const Protocol& p);

/// |integral_0^t_f q0'(t) exp(-i omega0 t) dt| with interior controller
/// jumps contributing -du * exp(-i omega0 t*). Needs panels >= 2.
double sloshing_amplitude(const Protocol& p, int panels = 1 << 16);

/// E(t) = hbar omega0 (n + 1/2) + (m/2) qc'^2 + (m/2) omega0^2 u^2.
double instantaneous_energy(const Protocol& p, double t, int n = 0);

/// Lewis-Riesenfeld phase of mode n at time t, radians.
double lr_phase(const Protocol& p, double t, int n = 0);

/// 6 m d^2 / (omega0^2 t_f^4): the smallest achievable time-averaged potential
/// energy over duration t_f.
double energy_lower_bound(const TransportSpec& spec, double t_f);

}  // namespace sbb::dynamics
