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

#include "sbb/shooting.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sbb/errors.hpp"

namespace sbb::shooting {

namespace {

constexpr std::array<double, kUnknowns> kAccelSigns{-1, 0, 1, 0, 1, 0, -1, 0, -1, 0, 1};

struct Knot {
  double u;
  double du;
};

using Matrix = Eigen::Matrix<double, kUnknowns, kUnknowns>;
using Vector = Eigen::Matrix<double, kUnknowns, 1>;

Matrix to_eigen(const Jacobian& jac) {
  Matrix m;
  for (std::size_t i = 0; i < kUnknowns; ++i)
    for (std::size_t j = 0; j < kUnknowns; ++j) m(i, j) = jac[i][j];
  return m;
}

}  // namespace

Times default_guess() {
  Times g{};
  for (std::size_t i = 0; i < kUnknowns; ++i) g[i] = 5e-3 * static_cast<double>(i + 1);
  return g;
}

void validate(const ShootingProblem& problem) {
  validate_spec(problem.spec, problem.constraints);
  if (!problem.constraints.epsilon || !problem.constraints.zeta) {
    throw DomainError("constraints", "shooting needs delta, epsilon and zeta");
  }
  for (std::size_t i = 0; i < kUnknowns; ++i) {
    const bool ok = std::isfinite(problem.guess[i]) && problem.guess[i] > 0.0 &&
                    (i == 0 || problem.guess[i] > problem.guess[i - 1]);
    if (!ok) throw DomainError("guess", "must be positive and strictly increasing");
  }
  if (!(problem.rho > 0.0 && problem.rho <= 1.0)) throw DomainError("rho", "must lie in (0, 1]");
  if (!(problem.tol > 0.0)) throw DomainError("tol", "must be > 0");
  if (problem.max_iter < 1) throw DomainError("max_iter", "must be >= 1");
  if (!(problem.fd_step > 0.0)) throw DomainError("fd_step", "must be > 0");
}

Residual residual(const ShootingProblem& problem, const Times& times) {
  for (double t : times) {
    if (!std::isfinite(t)) throw EvaluationError("non-finite switching time");
  }
  if (!(times.back() > 0.0)) throw EvaluationError("t_f must be > 0");

  const auto& spec = problem.spec;
  const double w2 = spec.omega0 * spec.omega0;
  const double delta = problem.constraints.delta;
  const double eps = problem.constraints.epsilon.value();
  const double zeta = problem.constraints.zeta.value();

  // State (qc, qc', u, u') advanced exactly across each constant-d2u interval.
  double x = 0.0, v = 0.0, u = 0.0, du = 0.0, t = 0.0;
  std::array<Knot, kUnknowns> knots{};
  for (std::size_t k = 0; k < kUnknowns; ++k) {
    const double a = zeta * kAccelSigns[k];
    const double s = times[k] - t;
    const double s2 = s * s, s3 = s2 * s;
    x += v * s - w2 * (0.5 * u * s2 + du * s3 / 6.0 + a * s2 * s2 / 24.0);
    v += -w2 * (u * s + 0.5 * du * s2 + a * s3 / 6.0);
    u += du * s + 0.5 * a * s2;
    du += a * s;
    t = times[k];
    knots[k] = {u, du};
  }
  const double d = spec.distance;
  // knots[k] holds the values at t_{k+1}; knots[10] at t_f.
  return {(x - d) / d,
          v / (d * spec.omega0),
          knots[10].u / delta,
          knots[10].du / eps,
          (knots[2].u + delta) / delta,
          (knots[6].u - delta) / delta,
          (knots[0].du + eps) / eps,
          knots[2].du / eps,
          (knots[4].du - eps) / eps,
          knots[6].du / eps,
          (knots[8].du + eps) / eps};
}

Jacobian jacobian(const ShootingProblem& problem, const Times& times) {
  Jacobian jac{};
  const double h = problem.fd_step;
  for (std::size_t j = 0; j < kUnknowns; ++j) {
    Times plus = times, minus = times;
    plus[j] += h;
    minus[j] -= h;
    const auto fp = residual(problem, plus);
    const auto fm = residual(problem, minus);
    for (std::size_t i = 0; i < kUnknowns; ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

double reciprocal_condition(const Jacobian& jac) {
  const Eigen::PartialPivLU<Matrix> lu(to_eigen(jac));
  return lu.rcond();
}

double norm(const Residual& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s);
}

ShootingResult solve(const ShootingProblem& problem) {
  validate(problem);
  ShootingResult result;
  Times g = problem.guess;
  auto f = residual(problem, g);
  double fnorm = norm(f);
  result.history.push_back({0, g, fnorm});

  for (int iter = 1; fnorm > problem.tol; ++iter) {
    if (iter > problem.max_iter) {
      throw NoConvergence("shooting did not converge in " + std::to_string(problem.max_iter) +
                          " iterations (|f| = " + std::to_string(fnorm) + ")");
    }
    const Matrix jac = to_eigen(jacobian(problem, g));
    const Eigen::PartialPivLU<Matrix> lu(jac);
    const double rc = lu.rcond();
    if (!(std::isfinite(rc) && rc > 1e-14)) {
      throw SingularJacobian(iter, "singular Jacobian at iteration " + std::to_string(iter));
    }
    Vector rhs;
    for (std::size_t i = 0; i < kUnknowns; ++i) rhs(i) = f[i];
    const Vector step = lu.solve(rhs);
    for (std::size_t i = 0; i < kUnknowns; ++i) g[i] -= problem.rho * step(i);
    f = residual(problem, g);
    fnorm = norm(f);
    if (!std::isfinite(fnorm)) {
      throw NoConvergence("residual became non-finite at iteration " + std::to_string(iter));
    }
    result.history.push_back({iter, g, fnorm});
    result.iterations = iter;
  }
  result.solution = g;
  result.residual_norm = fnorm;
  result.converged = true;
  return result;
}

Protocol to_protocol(const ShootingProblem& problem, const Times& times) {
  validate_spec(problem.spec, problem.constraints);
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), times.begin(), times.end());
  std::vector<double> accel;
  for (double s : kAccelSigns) accel.push_back(s * problem.constraints.zeta.value());
  auto pieces = controller_from_derivative(breaks, accel, 2);
  std::vector<double> switches(times.begin(), times.end() - 1);
  return protocol_from_controller(problem.spec, problem.constraints, ProtocolKind::Numerical,
                                  breaks, pieces, std::move(switches));
}

}  // namespace sbb::shooting
