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

#include <vector>

#include "sbb/core.hpp"

// Closed-form near-time-optimal protocols. Each generator returns a Protocol
// whose qc is the exact double integral of -omega0^2 u with qc(0) = qc'(0) = 0.

namespace sbb::analytic {

struct SwitchingSchedule {
  std::vector<double> times;  // 1, 4 or 10 entries
  double t_f = 0.0;
};

/// t_f = (2/omega0) sqrt(d/delta).
double bang_bang_time(const TransportSpec& spec, double delta);
/// Near-minimal time with |u| <= delta, |u'| <= epsilon.
double vel_bounded_time(const TransportSpec& spec, double delta, double epsilon);
/// Near-minimal time with all three bounds; exceeds the velocity-bounded
/// time by exactly epsilon/zeta.
double acc_bounded_time(const TransportSpec& spec, double delta, double epsilon, double zeta);

SwitchingSchedule bang_bang_schedule(const TransportSpec& spec, double delta);
SwitchingSchedule vel_bounded_schedule(const TransportSpec& spec, double delta, double epsilon);
SwitchingSchedule acc_bounded_schedule(const TransportSpec& spec, double delta, double epsilon,
                                       double zeta);

/// True when the ten acceleration-bounded switching times are strictly
/// increasing inside (0, t_f), i.e. epsilon^2 < delta*zeta and the middle
/// plateaus have positive length.
bool acc_bounded_regime_valid(const TransportSpec& spec, double delta, double epsilon, double zeta);

Protocol bang_bang(const TransportSpec& spec, double delta);

/// Throws RegimeError when t_f < 4 delta/epsilon (the -delta plateau vanishes).
Protocol vel_bounded(const TransportSpec& spec, double delta, double epsilon);

/// In the degenerate regime epsilon^2 > delta*zeta the protocol carries
/// regime_warning "degenerate": t_f and the closed-form switch times are
/// returned as computed, the segments are the moving average of the
/// velocity-bounded controller over a window epsilon/zeta, and no bound is
/// certified.
Protocol acc_bounded(const TransportSpec& spec, double delta, double epsilon, double zeta);

/// qc = d (35 s^4 - 84 s^5 + 70 s^6 - 20 s^7), s = t/t_f.
Protocol polynomial_ansatz(const TransportSpec& spec, double t_f);

/// Dispatches on which bounds are present.
double near_minimal_time(const TransportSpec& spec, const ConstraintSet& constraints);

/// Generator matching the bounds present in `constraints`.
Protocol design(const TransportSpec& spec, const ConstraintSet& constraints);

}  // namespace sbb::analytic
