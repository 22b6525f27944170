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

#include "sbb/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sbb/errors.hpp"

namespace sbb::analytic {

namespace {

ConstraintSet make_constraints(double delta, std::optional<double> epsilon = {},
                               std::optional<double> zeta = {}) {
  ConstraintSet c;
  c.delta = delta;
  c.epsilon = epsilon;
  c.zeta = zeta;
  return c;
}

}  // namespace

double bang_bang_time(const TransportSpec& spec, double delta) {
  validate_spec(spec, make_constraints(delta));
  return 2.0 / spec.omega0 * std::sqrt(spec.distance / delta);
}

double vel_bounded_time(const TransportSpec& spec, double delta, double epsilon) {
  validate_spec(spec, make_constraints(delta, epsilon));
  const double w = spec.omega0;
  const double r = delta / epsilon;
  return r + 2.0 / w * std::sqrt(spec.distance / delta + w * w * r * r / 4.0);
}

double acc_bounded_time(const TransportSpec& spec, double delta, double epsilon, double zeta) {
  validate_spec(spec, make_constraints(delta, epsilon, zeta));
  return vel_bounded_time(spec, delta, epsilon) + epsilon / zeta;
}

SwitchingSchedule bang_bang_schedule(const TransportSpec& spec, double delta) {
  const double t_f = bang_bang_time(spec, delta);
  return {{0.5 * t_f}, t_f};
}

SwitchingSchedule vel_bounded_schedule(const TransportSpec& spec, double delta, double epsilon) {
  const double t_f = vel_bounded_time(spec, delta, epsilon);
  const double r = delta / epsilon;
  return {{r, 0.5 * t_f - r, 0.5 * t_f + r, t_f - r}, t_f};
}

SwitchingSchedule acc_bounded_schedule(const TransportSpec& spec, double delta, double epsilon,
                                       double zeta) {
  const double t_f = acc_bounded_time(spec, delta, epsilon, zeta);
  const double w = epsilon / zeta;
  const double r = delta / epsilon;
  const double t1 = w, t2 = r, t3 = r + w;
  const double t4 = 0.5 * (t_f - 2.0 * r - w), t5 = 0.5 * (t_f - 2.0 * r + w);
  const double t6 = 0.5 * (t_f + 2.0 * r - w), t7 = 0.5 * (t_f + 2.0 * r + w);
  return {{t1, t2, t3, t4, t5, t6, t7, t_f - t3, t_f - t2, t_f - t1}, t_f};
}

bool acc_bounded_regime_valid(const TransportSpec& spec, double delta, double epsilon,
                              double zeta) {
  const auto s = acc_bounded_schedule(spec, delta, epsilon, zeta);
  double prev = 0.0;
  for (double t : s.times) {
    if (!(t > prev)) return false;
    prev = t;
  }
  return prev < s.t_f;
}

Protocol bang_bang(const TransportSpec& spec, double delta) {
  const auto s = bang_bang_schedule(spec, delta);
  const std::array<double, 3> breaks{0.0, s.times[0], s.t_f};
  const std::vector<std::vector<double>> pieces{{-delta}, {delta}};
  return protocol_from_controller(spec, make_constraints(delta), ProtocolKind::BangBang, breaks,
                                  pieces, s.times);
}

Protocol vel_bounded(const TransportSpec& spec, double delta, double epsilon) {
  const auto s = vel_bounded_schedule(spec, delta, epsilon);
  if (s.t_f < 4.0 * delta / epsilon) {
    throw RegimeError("velocity-bounded protocol requires t_f >= 4 delta/epsilon (t_f = " +
                      std::to_string(s.t_f) + " s)");
  }
  const std::array<double, 6> breaks{0.0, s.times[0], s.times[1], s.times[2], s.times[3], s.t_f};
  const std::array<double, 5> slopes{-epsilon, 0.0, epsilon, 0.0, -epsilon};
  auto pieces = controller_from_derivative(breaks, slopes, 1);
  return protocol_from_controller(spec, make_constraints(delta, epsilon), ProtocolKind::VelBounded,
                                  breaks, pieces, s.times);
}

Protocol acc_bounded(const TransportSpec& spec, double delta, double epsilon, double zeta) {
  const auto s = acc_bounded_schedule(spec, delta, epsilon, zeta);
  const auto constraints = make_constraints(delta, epsilon, zeta);
  if (acc_bounded_regime_valid(spec, delta, epsilon, zeta)) {
    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), s.times.begin(), s.times.end());
    breaks.push_back(s.t_f);
    const std::array<double, 11> accel{-zeta, 0.0, zeta, 0.0, zeta, 0.0,
                                       -zeta, 0.0, -zeta, 0.0, zeta};
    auto pieces = controller_from_derivative(breaks, accel, 2);
    return protocol_from_controller(spec, constraints, ProtocolKind::AccBounded, breaks, pieces,
                                    s.times);
  }

  // Degenerate ordering: average the velocity-bounded controller over a
  // window of length epsilon/zeta. Its second derivative is
  // (v(t) - v(t - w)) / w with v the velocity-bounded du/dt schedule.
  const auto base = vel_bounded_schedule(spec, delta, epsilon);
  if (base.t_f < 4.0 * delta / epsilon) {
    throw RegimeError("no acceleration-bounded segment set: velocity-bounded base is degenerate");
  }
  const double w = epsilon / zeta;
  const std::array<double, 6> vb{0.0, base.times[0], base.times[1], base.times[2], base.times[3],
                                 base.t_f};
  const std::array<double, 5> vs{-epsilon, 0.0, epsilon, 0.0, -epsilon};
  auto slope = [&](double t) {
    if (t < 0.0 || t >= base.t_f) return 0.0;
    const auto k = static_cast<std::size_t>(std::upper_bound(vb.begin(), vb.end(), t) - vb.begin());
    return vs[k - 1];
  };
  std::vector<double> breaks;
  for (double b : vb) {
    breaks.push_back(b);
    breaks.push_back(b + w);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.back() = s.t_f;
  std::vector<double> accel;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    accel.push_back((slope(mid) - slope(mid - w)) / w);
  }
  auto pieces = controller_from_derivative(breaks, accel, 2);
  return protocol_from_controller(spec, constraints, ProtocolKind::AccBounded, breaks, pieces,
                                  s.times, std::string("degenerate"));
}

Protocol polynomial_ansatz(const TransportSpec& spec, double t_f) {
  validate_spec(spec);
  if (!(std::isfinite(t_f) && t_f > 0.0)) throw DomainError("t_f", "must be finite and > 0");
  // P(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7 on s = t / t_f, re-expanded about
  // the start of each dense segment so local coefficients stay small.
  constexpr int kSegments = 64;
  constexpr long double P[8] = {0, 0, 0, 0, 35, -84, 70, -20};
  const long double d = spec.distance, T = t_f;
  const long double w2 = static_cast<long double>(spec.omega0) * spec.omega0;
  std::vector<PiecewiseSegment> us, qs;
  us.reserve(kSegments);
  qs.reserve(kSegments);
  double peak = 0.0;
  for (int k = 0; k < kSegments; ++k) {
    const long double s0 = static_cast<long double>(k) / kSegments;
    // Taylor coefficients of P about s0: sum_j P[j] C(j, i) s0^(j - i).
    long double taylor[8] = {};
    for (int j = 0; j < 8; ++j) {
      long double binom = 1.0L;
      for (int i = 0; i <= j; ++i) {
        taylor[i] += P[j] * binom * std::pow(s0, j - i);
        binom = binom * (j - i) / (i + 1);
      }
    }
    std::vector<double> q(8), u(6);
    long double scale = d;
    for (int i = 0; i < 8; ++i, scale /= T) q[i] = static_cast<double>(taylor[i] * scale);
    scale = d / (T * T);
    for (int i = 0; i < 6; ++i, scale /= T) {
      u[i] = static_cast<double>(-taylor[i + 2] * (i + 1) * (i + 2) * scale / w2);
    }
    const double t0 = (k == 0) ? 0.0 : t_f * k / kSegments;
    const double t1 = (k == kSegments - 1) ? t_f : t_f * (k + 1) / kSegments;
    us.push_back({t0, t1, u});
    qs.push_back({t0, t1, q});
    for (int i = 0; i <= 16; ++i) peak = std::max(peak, std::abs(us.back().value(t0 + (t1 - t0) * i / 16)));
  }
  // The ansatz implies no bound; its constraint set records the peak |u|,
  // reached where u ~ s^2 (1 - s)^2 (1 - 2 s) is extremal, s = (5 - sqrt 5) / 10.
  ConstraintSet c;
  c.delta = std::max(peak, 16.8 / std::sqrt(5.0) * spec.distance / (spec.omega0 * spec.omega0 * t_f * t_f));
  return Protocol(spec, c, ProtocolKind::PolynomialAnsatz, t_f, {}, std::move(us), std::move(qs));
}

double near_minimal_time(const TransportSpec& spec, const ConstraintSet& constraints) {
  validate_spec(spec, constraints);
  if (constraints.zeta) {
    return acc_bounded_time(spec, constraints.delta, *constraints.epsilon, *constraints.zeta);
  }
  if (constraints.epsilon) return vel_bounded_time(spec, constraints.delta, *constraints.epsilon);
  return bang_bang_time(spec, constraints.delta);
}

Protocol design(const TransportSpec& spec, const ConstraintSet& constraints) {
  validate_spec(spec, constraints);
  if (constraints.zeta) {
    return acc_bounded(spec, constraints.delta, *constraints.epsilon, *constraints.zeta);
  }
  if (constraints.epsilon) return vel_bounded(spec, constraints.delta, *constraints.epsilon);
  return bang_bang(spec, constraints.delta);
}

}  // namespace sbb::analytic
