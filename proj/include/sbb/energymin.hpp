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

#include <span>
#include <utility>
#include <vector>

#include "sbb/core.hpp"

// Fixed-duration minimization of the time-averaged potential energy by direct
// transcription: the controller is piecewise linear in N nodes, the state is
// advanced by RK4 with M - 1 substeps per node interval, and the resulting
// program is solved by an augmented Lagrangian around a projected Newton
// (two-metric gradient projection) inner loop with adjoint gradients.

namespace sbb::energymin {

struct TranscriptionGrid {
  int nodes = 100;    // N
  int substeps = 10;  // M; each node interval holds M - 1 RK4 steps

  /// RK4 step h = t_f / ((N - 1)(M - 1)).
  double step(double t_f) const { return t_f / ((nodes - 1.0) * (substeps - 1.0)); }
};

struct OptimizerSettings {
  double feasibility_tol = 1e-9;  // termination target, dimensionless
  double accept_tol = 1e-6;       // an iterate counts as feasible below this
  double optimality_tol = 1e-8;   // projected-gradient infinity norm
  int max_outer = 60;
  int max_inner = 50000;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e9;
};

/// Endpoint handling: with epsilon present the first and last nodes are
/// pinned at zero; with zeta present the second-difference bound is also
/// applied across both endpoints against a zero ghost node, which is the
/// discrete form of du/dt vanishing at 0 and t_f.
struct EnergyMinProblem {
  TransportSpec spec;
  ConstraintSet constraints;
  double t_f = 0.0;
  TranscriptionGrid grid;
  std::vector<double> init;  // N controller nodes in m; empty selects the default
  OptimizerSettings settings;
};

struct EnergyMinReport {
  double ratio = 0.0;        // avg potential energy / lower bound
  double lower_bound = 0.0;  // J
  double max_violation = 0.0;
  double objective_gap = 0.0;  // |ratio of transcription - ratio of returned protocol|
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<double> nodes;  // m
};

struct EnergyMinResult {
  Protocol protocol;
  double avg_potential_energy;  // J
  EnergyMinReport report;
};

/// Linear controller u = (6d/(omega0^2 t_f^2)) (2t/t_f - 1) and its energy
/// 6 m d^2 / (omega0^2 t_f^4).
std::pair<Protocol, double> unbounded_optimum(const TransportSpec& spec, double t_f);

/// The unbounded linear controller sampled on the nodes and clipped into
/// the feasible box.
std::vector<double> default_initial_nodes(const EnergyMinProblem& problem);

void validate(const EnergyMinProblem& problem);

/// Throws Infeasible if no iterate satisfies the constraints to accept_tol,
/// NoConvergence if the outer loop ends without a stationary point and its
/// best iterate misses feasibility_tol.
EnergyMinResult minimize_energy(const EnergyMinProblem& problem);

/// RK4 recursion of (qc, qc', J_E) under a piecewise-linear controller.
class Transcription {
 public:
  Transcription(const TransportSpec& spec, double t_f, TranscriptionGrid grid);

  struct Terminal {
    double qc;      // m
    double qc_dot;  // m/s
    double cost;    // integral of (m/2) omega0^2 u^2, J*s
  };

  Terminal propagate(std::span<const double> nodes) const;

  /// Gradient of w_qc*qc(t_f) + w_qc_dot*qc'(t_f) + w_cost*J_E with respect to
  /// the nodes (m), by reverse sweep through the RK4 stages.
  std::vector<double> adjoint_gradient(std::span<const double> nodes, double w_qc,
                                       double w_qc_dot, double w_cost) const;

  int nodes() const { return grid_.nodes; }
  double node_spacing() const { return t_f_ / (grid_.nodes - 1); }

 private:
  TransportSpec spec_;
  double t_f_;
  TranscriptionGrid grid_;
};

}  // namespace sbb::energymin
