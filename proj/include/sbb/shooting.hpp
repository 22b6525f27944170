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
#include <vector>

#include "sbb/core.hpp"

// Multiple-shooting Newton solver for the ten switching times and the
// duration of the acceleration-bounded protocol.

namespace sbb::shooting {

inline constexpr std::size_t kUnknowns = 11;

/// (t1, ..., t10, t_f), seconds.
using Times = std::array<double, kUnknowns>;
using Residual = std::array<double, kUnknowns>;
/// Row-major; jac[i][j] = d f_i / d t_j.
using Jacobian = std::array<std::array<double, kUnknowns>, kUnknowns>;

struct ShootingProblem {
  TransportSpec spec;
  ConstraintSet constraints;  // delta, epsilon and zeta all required
  Times guess{};
  double rho = 0.5;
  double tol = 1e-4;  // on the dimensionless residual norm
  int max_iter = 200;
  double fd_step = 1e-7;  // s
};

struct IterationRecord {
  int iteration;
  Times g;
  double residual_norm;
};

struct ShootingResult {
  Times solution{};
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> history;  // entry 0 is the initial guess
  bool converged = false;
};

/// {5, 10, ..., 55} ms.
Times default_guess();

/// Throws DomainError on a malformed problem.
void validate(const ShootingProblem& problem);

/// Terminal and switching-point residuals of the piecewise-constant
/// d2u/dt2 = zeta * (-1, 0, 1, 0, 1, 0, -1, 0, -1, 0, 1) schedule integrated
/// from rest. Position entries are scaled by d, qc' by d*omega0, u entries by
/// delta and du/dt entries by epsilon. Out-of-order times are integrated as
/// signed intervals; EvaluationError if times are non-finite or t_f <= 0.
Residual residual(const ShootingProblem& problem, const Times& times);

/// Central finite differences with step problem.fd_step.
Jacobian jacobian(const ShootingProblem& problem, const Times& times);

/// Reciprocal condition number estimate (1-norm) of the LU factorization.
double reciprocal_condition(const Jacobian& jac);

double norm(const Residual& f);

/// Damped Newton: g <- g - rho * J^{-1} f until |f| <= tol. Throws
/// SingularJacobian or NoConvergence.
ShootingResult solve(const ShootingProblem& problem);

/// Numerical protocol for a (converged) switching schedule.
Protocol to_protocol(const ShootingProblem& problem, const Times& times);

}  // namespace sbb::shooting
