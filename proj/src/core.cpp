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

#include "sbb/core.hpp"

#include <algorithm>
#include <cmath>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

void require_positive(double value, const char* field) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw DomainError(field, "must be finite and > 0 (got " + std::to_string(value) + ")");
  }
}

}  // namespace

void validate_spec(const TransportSpec& spec) {
  require_positive(spec.mass, "mass");
  require_positive(spec.omega0, "omega0");
  require_positive(spec.distance, "distance");
  require_positive(spec.hbar, "hbar");
}

void validate_spec(const TransportSpec& spec, const ConstraintSet& constraints) {
  validate_spec(spec);
  require_positive(constraints.delta, "delta");
  if (constraints.epsilon) require_positive(*constraints.epsilon, "epsilon");
  if (constraints.zeta) {
    if (!constraints.epsilon) {
      throw DomainError("hierarchy", "zeta requires epsilon to be present");
    }
    require_positive(*constraints.zeta, "zeta");
  }
}

ConstraintSet constraints_from_ratios(const TransportSpec& spec, double delta_ratio,
                                      std::optional<double> epsilon_ratio,
                                      std::optional<double> zeta_ratio) {
  ConstraintSet c;
  c.delta = delta_ratio * spec.distance;
  if (epsilon_ratio) c.epsilon = *epsilon_ratio * spec.distance * spec.omega0;
  if (zeta_ratio) c.zeta = *zeta_ratio * spec.distance * spec.omega0 * spec.omega0;
  return c;
}

double poly_eval(std::span<const double> coeffs, double tau) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
  if (coeffs.size() <= 1) return {0.0};
  std::vector<double> out(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k) out[k - 1] = static_cast<double>(k) * coeffs[k];
  return out;
}

std::vector<double> poly_antiderivative(std::span<const double> coeffs, double constant) {
  std::vector<double> out(coeffs.size() + 1);
  out[0] = constant;
  for (std::size_t k = 0; k < coeffs.size(); ++k) out[k + 1] = coeffs[k] / static_cast<double>(k + 1);
  return out;
}

std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {0.0};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double poly_integral(std::span<const double> coeffs, double length) {
  const auto anti = poly_antiderivative(coeffs);
  return poly_eval(anti, length);
}

double PiecewiseSegment::value(double t, int derivative) const {
  const double tau = t - t_start;
  if (derivative == 0) return poly_eval(coeffs, tau);
  std::vector<double> d(coeffs.begin(), coeffs.end());
  for (int k = 0; k < derivative; ++k) d = poly_derivative(d);
  return poly_eval(d, tau);
}

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::BangBang: return "BangBang";
    case ProtocolKind::VelBounded: return "VelBounded";
    case ProtocolKind::AccBounded: return "AccBounded";
    case ProtocolKind::PolynomialAnsatz: return "PolynomialAnsatz";
    case ProtocolKind::Numerical: return "Numerical";
  }
  return "Unknown";
}

std::optional<ProtocolKind> protocol_kind_from_string(std::string_view name) {
  for (auto k : {ProtocolKind::BangBang, ProtocolKind::VelBounded, ProtocolKind::AccBounded,
                 ProtocolKind::PolynomialAnsatz, ProtocolKind::Numerical}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Protocol::Protocol(TransportSpec spec, ConstraintSet constraints, ProtocolKind kind, double t_f,
                   std::vector<double> switch_times, std::vector<PiecewiseSegment> u_segments,
                   std::vector<PiecewiseSegment> qc_segments,
                   std::optional<std::string> regime_warning)
    : spec_(spec),
      constraints_(std::move(constraints)),
      kind_(kind),
      t_f_(t_f),
      switch_times_(std::move(switch_times)),
      u_segments_(std::move(u_segments)),
      qc_segments_(std::move(qc_segments)),
      regime_warning_(std::move(regime_warning)) {
  validate_spec(spec_);
  require_positive(t_f_, "t_f");
  if (u_segments_.empty() || u_segments_.size() != qc_segments_.size()) {
    throw DomainError("segments", "u and qc segment lists must be non-empty and of equal length");
  }
  double expected_start = 0.0;
  for (std::size_t i = 0; i < u_segments_.size(); ++i) {
    const auto& us = u_segments_[i];
    const auto& qs = qc_segments_[i];
    if (us.t_start != expected_start || qs.t_start != us.t_start || qs.t_end != us.t_end) {
      throw DomainError("segments", "segments do not tile [0, t_f] on shared breakpoints");
    }
    if (!(us.t_start < us.t_end)) throw DomainError("segments", "segment with t_start >= t_end");
    if (us.coeffs.empty() || qs.coeffs.empty()) throw DomainError("segments", "empty coefficients");
    expected_start = us.t_end;
  }
  if (expected_start != t_f_) throw DomainError("segments", "last segment must end at t_f");
  if (!regime_warning_) {
    for (std::size_t i = 0; i < switch_times_.size(); ++i) {
      const double s = switch_times_[i];
      const bool ordered = i == 0 || switch_times_[i - 1] < s;
      if (!(s > 0.0 && s < t_f_ && ordered)) {
        throw DomainError("switch_times", "must be strictly increasing within (0, t_f)");
      }
    }
  }
}

std::size_t Protocol::segment_index(double t) const {
  auto it = std::upper_bound(u_segments_.begin(), u_segments_.end(), t,
                             [](double v, const PiecewiseSegment& s) { return v < s.t_start; });
  if (it == u_segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(u_segments_.begin(), it)) - 1;
}

double Protocol::u(double t, int derivative) const {
  return u_segments_[segment_index(t)].value(t, derivative);
}

double Protocol::qc(double t, int derivative) const {
  return qc_segments_[segment_index(t)].value(t, derivative);
}

ProtocolSample eval_protocol(const Protocol& p, double t) {
  if (!(t >= 0.0 && t <= p.t_f())) {
    throw OutOfRange("t = " + std::to_string(t) + " outside [0, " + std::to_string(p.t_f()) + "]");
  }
  const auto& seg = p.qc_segments()[p.segment_index(t)];
  const double w2 = p.spec().omega0 * p.spec().omega0;
  ProtocolSample s{};
  s.u = p.u(t);
  s.qc = seg.value(t);
  s.qc_dot = seg.value(t, 1);
  s.q0 = s.qc + seg.value(t, 2) / w2;
  return s;
}

double controller_at(const Protocol& p, double t) {
  if (t < 0.0 || t > p.t_f()) return 0.0;
  return p.u(t);
}

std::vector<std::vector<double>> controller_from_derivative(std::span<const double> breaks,
                                                            std::span<const double> values,
                                                            int order) {
  if (breaks.size() != values.size() + 1) {
    throw DomainError("breaks", "need exactly one more breakpoint than derivative values");
  }
  if (order != 1 && order != 2) throw DomainError("order", "must be 1 or 2");
  std::vector<std::vector<double>> pieces;
  pieces.reserve(values.size());
  double u0 = 0.0, v0 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    const double a = values[i];
    if (order == 1) {
      pieces.push_back({u0, a});
      u0 += a * len;
    } else {
      pieces.push_back({u0, v0, 0.5 * a});
      u0 += v0 * len + 0.5 * a * len * len;
      v0 += a * len;
    }
  }
  return pieces;
}

Protocol protocol_from_controller(const TransportSpec& spec, const ConstraintSet& constraints,
                                  ProtocolKind kind, std::span<const double> breaks,
                                  const std::vector<std::vector<double>>& u_pieces,
                                  std::vector<double> switch_times,
                                  std::optional<std::string> regime_warning) {
  if (breaks.size() != u_pieces.size() + 1) {
    throw DomainError("breaks", "need exactly one more breakpoint than controller pieces");
  }
  const double w2 = spec.omega0 * spec.omega0;
  std::vector<PiecewiseSegment> us, qs;
  double x = 0.0, v = 0.0;
  for (std::size_t i = 0; i < u_pieces.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double len = b - a;
    std::vector<double> q(u_pieces[i].size() + 2, 0.0);
    q[0] = x;
    q[1] = v;
    for (std::size_t k = 0; k < u_pieces[i].size(); ++k) {
      q[k + 2] = -w2 * u_pieces[i][k] / static_cast<double>((k + 1) * (k + 2));
    }
    if (len < 0.0) throw DomainError("breaks", "breakpoints must be non-decreasing");
    x = poly_eval(q, len);
    v = poly_eval(poly_derivative(q), len);
    if (len == 0.0) continue;
    us.push_back({a, b, u_pieces[i]});
    qs.push_back({a, b, std::move(q)});
  }
  const double t_f = breaks.back();
  return Protocol(spec, constraints, kind, t_f, std::move(switch_times), std::move(us),
                  std::move(qs), std::move(regime_warning));
}

}  // namespace sbb
