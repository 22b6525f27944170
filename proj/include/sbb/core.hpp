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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbb {

inline constexpr double kPi = 3.14159265358979323846;
/// Reduced Planck constant, J*s.
inline constexpr double kHbar = 1.054571817e-34;
/// Mass of a 87Rb atom, kg.
inline constexpr double kRubidium87Mass = 1.44269e-25;

/// Physical problem statement. All values SI.
struct TransportSpec {
  double mass = kRubidium87Mass;  // kg
  double omega0 = 0.0;            // trap angular frequency, rad/s
  double distance = 0.0;          // transport distance d, m
  double hbar = kHbar;            // J*s
};

/// Bounds on the controller u = qc - q0 and its first two derivatives.
/// `zeta` may only be present together with `epsilon`.
struct ConstraintSet {
  double delta = 0.0;                 // |u| <= delta, m
  std::optional<double> epsilon;      // |du/dt| <= epsilon, m/s
  std::optional<double> zeta;         // |d2u/dt2| <= zeta, m/s^2
};

/// Throws DomainError naming the violated field.
void validate_spec(const TransportSpec& spec, const ConstraintSet& constraints);
void validate_spec(const TransportSpec& spec);

/// Builds SI constraints from the dimensionless ratios delta/d,
/// epsilon/(d*omega0) and zeta/(d*omega0^2).
ConstraintSet constraints_from_ratios(const TransportSpec& spec, double delta_ratio,
                                      std::optional<double> epsilon_ratio = {},
                                      std::optional<double> zeta_ratio = {});

// ---------------------------------------------------------------------------
// Polynomials in the local coordinate tau = t - t_start; coeffs[k] multiplies
// tau^k.

double poly_eval(std::span<const double> coeffs, double tau);
std::vector<double> poly_derivative(std::span<const double> coeffs);
/// Antiderivative with the given value at tau = 0.
std::vector<double> poly_antiderivative(std::span<const double> coeffs, double constant = 0.0);
std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b);
/// Integral over [0, length].
double poly_integral(std::span<const double> coeffs, double length);

struct PiecewiseSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> coeffs;

  double value(double t, int derivative = 0) const;
  double length() const { return t_end - t_start; }
};

enum class ProtocolKind { BangBang, VelBounded, AccBounded, PolynomialAnsatz, Numerical };

std::string_view to_string(ProtocolKind kind);
std::optional<ProtocolKind> protocol_kind_from_string(std::string_view name);

/// Controller u(t), mode center qc(t) and trap center q0(t) over [0, t_f],
/// stored as exact polynomial pieces. Immutable once constructed; the
/// constructor checks that both segment lists tile [0, t_f] on the same
/// breakpoints and that switch times are increasing (unless a regime warning
/// is attached).
class Protocol {
 public:
  Protocol(TransportSpec spec, ConstraintSet constraints, ProtocolKind kind, double t_f,
           std::vector<double> switch_times, std::vector<PiecewiseSegment> u_segments,
           std::vector<PiecewiseSegment> qc_segments,
           std::optional<std::string> regime_warning = std::nullopt);

  const TransportSpec& spec() const noexcept { return spec_; }
  const ConstraintSet& constraints() const noexcept { return constraints_; }
  ProtocolKind kind() const noexcept { return kind_; }
  double t_f() const noexcept { return t_f_; }
  const std::vector<double>& switch_times() const noexcept { return switch_times_; }
  const std::vector<PiecewiseSegment>& u_segments() const noexcept { return u_segments_; }
  const std::vector<PiecewiseSegment>& qc_segments() const noexcept { return qc_segments_; }
  const std::optional<std::string>& regime_warning() const noexcept { return regime_warning_; }

  /// Index of the segment containing t; at a breakpoint the right-hand
  /// segment wins, except at t_f which belongs to the last segment.
  std::size_t segment_index(double t) const;

  /// d^k u / dt^k and d^k qc / dt^k inside [0, t_f] (right limits).
  double u(double t, int derivative = 0) const;
  double qc(double t, int derivative = 0) const;

 private:
  TransportSpec spec_;
  ConstraintSet constraints_;
  ProtocolKind kind_;
  double t_f_;
  std::vector<double> switch_times_;
  std::vector<PiecewiseSegment> u_segments_;
  std::vector<PiecewiseSegment> qc_segments_;
  std::optional<std::string> regime_warning_;
};

struct ProtocolSample {
  double u;       // m
  double qc;      // m
  double q0;      // m
  double qc_dot;  // m/s
};

/// Throws OutOfRange if t is outside [0, t_f].
ProtocolSample eval_protocol(const Protocol& p, double t);

/// u(t) extended by zero outside [0, t_f].
double controller_at(const Protocol& p, double t);

/// Integrates qc'' = -omega0^2 u piecewise from qc(0) = qc'(0) = 0 and
/// assembles the protocol. `breaks` has one more entry than `u_pieces`;
/// zero-length pieces are dropped.
Protocol protocol_from_controller(const TransportSpec& spec, const ConstraintSet& constraints,
                                  ProtocolKind kind, std::span<const double> breaks,
                                  const std::vector<std::vector<double>>& u_pieces,
                                  std::vector<double> switch_times,
                                  std::optional<std::string> regime_warning = std::nullopt);

/// Piecewise-polynomial u obtained by integrating a piecewise-constant
/// derivative of the given order (1: du/dt, 2: d2u/dt2) from u = u' = 0.
std::vector<std::vector<double>> controller_from_derivative(std::span<const double> breaks,
                                                            std::span<const double> values,
                                                            int order);

}  // namespace sbb
