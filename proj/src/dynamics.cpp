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

#include "sbb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace sbb::dynamics {

namespace {

std::vector<int> distribute(const Protocol& p, int total, bool even) {
  std::vector<int> n;
  for (const auto& s : p.u_segments()) {
    int k = static_cast<int>(std::lround(total * s.length() / p.t_f()));
    if (even) k += k % 2;
    n.push_back(std::max(k, even ? 2 : 1));
  }
  return n;
}

double neumaier_error(double s, double x, double t) {
  return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
}

std::complex<double> neumaier_error(std::complex<double> s, std::complex<double> x,
                                    std::complex<double> t) {
  return {neumaier_error(s.real(), x.real(), t.real()),
          neumaier_error(s.imag(), x.imag(), t.imag())};
}

template <class F>
auto simpson(F&& f, double a, double b, int panels) {
  using V = decltype(f(a));
  const double h = (b - a) / panels;
  // Compensated (Neumaier) summation keeps the result at roundoff level
  // when the integral cancels almost exactly.
  V sum = f(a), carry{};
  auto add = [&](V x) {
    const V t = sum + x;
    carry += neumaier_error(sum, x, t);
    sum = t;
  };
  add(f(b));
  for (int i = 1; i < panels; ++i) add((i % 2 ? 4.0 : 2.0) * f(a + i * h));
  return (sum + carry) * (h / 3.0);
}

void check_time(const Protocol& p, double t) {
  if (!(t >= 0.0 && t <= p.t_f())) {
    throw OutOfRange("t = " + std::to_string(t) + " outside [0, t_f]");
  }
}

}  // namespace

std::vector<TrajectoryPoint> integrate_auxiliary(const Protocol& p, int steps) {
  if (steps < 1) throw DomainError("steps", "must be >= 1");
  const double w2 = p.spec().omega0 * p.spec().omega0;
  const auto counts = distribute(p, steps, false);
  std::vector<TrajectoryPoint> out{{0.0, 0.0, 0.0}};
  State<2> x{0.0, 0.0};
  for (std::size_t i = 0; i < p.u_segments().size(); ++i) {
    const auto& us = p.u_segments()[i];
    const auto& qs = p.qc_segments()[i];
    auto q0 = [&](double t) { return qs.value(t) - us.value(t); };
    auto deriv = [&](double t, const State<2>& s) { return State<2>{s[1], -w2 * (s[0] - q0(t))}; };
    const auto traj = rk4_integrate(deriv, x, us.t_start, us.t_end, counts[i]);
    const double h = us.length() / counts[i];
    for (std::size_t j = 1; j < traj.size(); ++j) {
      const double t = j + 1 == traj.size() ? us.t_end : us.t_start + h * static_cast<double>(j);
      out.push_back({t, traj[j][0], traj[j][1]});
    }
    x = traj.back();
  }
  return out;
}

bool MetricsReport::passed() const {
  return std::all_of(boundary_residuals.begin(), boundary_residuals.end(),
                     [](const BoundaryResidual& r) { return r.passed(); });
}

double energy_lower_bound(const TransportSpec& spec, double t_f) {
  validate_spec(spec);
  if (!(t_f > 0.0)) throw DomainError("t_f", "must be > 0");
  const double d = spec.distance, w = spec.omega0;
  return 6.0 * spec.mass * d * d / (w * w * std::pow(t_f, 4));
}

double avg_potential_energy(const Protocol& p) {
  const double scale = 0.5 * p.spec().mass * p.spec().omega0 * p.spec().omega0;
  double integral = 0.0;
  if (p.kind() == ProtocolKind::Numerical) {
    const auto panels = distribute(p, 10000, true);
    for (std::size_t i = 0; i < p.u_segments().size(); ++i) {
      const auto& s = p.u_segments()[i];
      integral += simpson([&](double t) { double v = s.value(t); return v * v; }, s.t_start,
                          s.t_end, panels[i]);
    }
  } else {
    for (const auto& s : p.u_segments()) {
      integral += poly_integral(poly_multiply(s.coeffs, s.coeffs), s.length());
    }
  }
  return scale * integral / p.t_f();
}

double sloshing_amplitude(const Protocol& p, int panels) {
  if (panels < 2) throw DomainError("panels", "must be >= 2");
  const double w = p.spec().omega0;
  const auto counts = distribute(p, panels, true);
  using cplx = std::complex<double>;
  cplx total{0.0, 0.0};
  const auto& us = p.u_segments();
  const auto& qs = p.qc_segments();
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto du = poly_derivative(us[i].coeffs);
    auto dq0 = poly_derivative(qs[i].coeffs);
    dq0.resize(std::max(dq0.size(), du.size()), 0.0);
    for (std::size_t k = 0; k < du.size(); ++k) dq0[k] -= du[k];
    const double a = us[i].t_start;
    auto f = [&](double t) { return poly_eval(dq0, t - a) * std::exp(cplx(0.0, -w * t)); };
    total += simpson(f, us[i].t_start, us[i].t_end, counts[i]);
    if (i > 0) {
      const double jump = us[i].value(a) - us[i - 1].value(a);
      total -= jump * std::exp(cplx(0.0, -w * a));
    }
  }
  return std::abs(total);
}

double instantaneous_energy(const Protocol& p, double t, int n) {
  check_time(p, t);
  if (n < 0) throw DomainError("n", "mode index must be >= 0");
  const auto& s = p.spec();
  const double v = p.qc(t, 1), u = p.u(t);
  return s.hbar * s.omega0 * (n + 0.5) + 0.5 * s.mass * v * v +
         0.5 * s.mass * s.omega0 * s.omega0 * u * u;
}

double lr_phase(const Protocol& p, double t, int n) {
  check_time(p, t);
  if (n < 0) throw DomainError("n", "mode index must be >= 0");
  const auto& s = p.spec();
  double kinetic = 0.0;
  for (const auto& seg : p.qc_segments()) {
    if (seg.t_start >= t) break;
    const auto v = poly_derivative(seg.coeffs);
    kinetic += poly_integral(poly_multiply(v, v), std::min(t, seg.t_end) - seg.t_start);
  }
  return -(n + 0.5) * s.omega0 * t - 0.5 * s.mass * kinetic / s.hbar;
}

MetricsReport verify_protocol(const Protocol& p, const VerifyOptions& options) {
  if (options.mode < 0) throw DomainError("mode", "must be >= 0");
  const auto& spec = p.spec();
  const double d = spec.distance, w = spec.omega0, m = spec.mass;
  const auto traj = integrate_auxiliary(p, options.steps);

  MetricsReport r;
  r.mode = options.mode;
  r.final_position = traj.back().qc;
  r.final_velocity = traj.back().qc_dot;
  r.avg_potential_energy = avg_potential_energy(p);
  r.sloshing_amplitude = sloshing_amplitude(p, options.slosh_panels);
  {
    const double dx = r.final_position - d;
    r.final_excess_energy = 0.5 * m * r.final_velocity * r.final_velocity + 0.5 * m * w * w * dx * dx;
  }

  const bool numerical = p.kind() == ProtocolKind::Numerical;
  const bool smooth_u = p.kind() == ProtocolKind::VelBounded ||
                        p.kind() == ProtocolKind::AccBounded ||
                        p.kind() == ProtocolKind::PolynomialAnsatz;
  const bool smooth_du =
      p.kind() == ProtocolKind::AccBounded || p.kind() == ProtocolKind::PolynomialAnsatz;
  const double pos_tol = (numerical ? 1e-6 : 1e-8) * d;
  const double t_f = p.t_f();
  auto& br = r.boundary_residuals;
  br.push_back({"qc(0)", p.qc(0.0), 1e-9 * d, true});
  br.push_back({"qc_dot(0)", p.qc(0.0, 1), 1e-9 * d * w, true});
  br.push_back({"qc(t_f)-d", r.final_position - d, pos_tol, true});
  br.push_back({"qc_dot(t_f)", r.final_velocity, pos_tol * w, true});
  br.push_back({"qc_ddot(0)", p.qc(0.0, 2), 1e-9 * d * w * w, smooth_u});
  br.push_back({"qc_ddot(t_f)", p.qc(t_f, 2), 1e-9 * d * w * w, smooth_u});
  br.push_back({"qc_dddot(0)", p.qc(0.0, 3), 1e-9 * d * w * w * w, smooth_du});
  br.push_back({"qc_dddot(t_f)", p.qc(t_f, 3), 1e-9 * d * w * w * w, smooth_du});

  const double ground = spec.hbar * w * (options.mode + 0.5);
  const std::size_t samples = static_cast<std::size_t>(std::max(options.trace_samples, 2));
  const std::size_t stride = std::max<std::size_t>(1, (traj.size() - 1) / (samples - 1));
  auto push = [&](const TrajectoryPoint& pt) {
    const std::size_t k = p.segment_index(pt.t);
    const double q0 = p.qc_segments()[k].value(pt.t) - p.u_segments()[k].value(pt.t);
    const double rel = pt.qc - q0;
    r.energy_trace.push_back(
        {pt.t, ground + 0.5 * m * pt.qc_dot * pt.qc_dot + 0.5 * m * w * w * rel * rel});
  };
  for (std::size_t j = 0; j < traj.size(); j += stride) push(traj[j]);
  if ((traj.size() - 1) % stride != 0) push(traj.back());
  return r;
}

}  // namespace sbb::dynamics
