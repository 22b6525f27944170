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

#include "sbb/energymin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "sbb/analytic.hpp"
#include "sbb/dynamics.hpp"
#include "sbb/errors.hpp"

namespace sbb::energymin {

Transcription::Transcription(const TransportSpec& spec, double t_f, TranscriptionGrid grid)
    : spec_(spec), t_f_(t_f), grid_(grid) {
  validate_spec(spec_);
  if (!(t_f_ > 0.0)) throw DomainError("t_f", "must be > 0");
  if (grid_.nodes < 2) throw DomainError("nodes", "N must be >= 2");
  if (grid_.substeps < 2) throw DomainError("substeps", "M must be >= 2");
}

Transcription::Terminal Transcription::propagate(std::span<const double> nodes) const {
  if (nodes.size() != static_cast<std::size_t>(grid_.nodes)) {
    throw DomainError("nodes", "expected " + std::to_string(grid_.nodes) + " controller nodes");
  }
  const double w2 = spec_.omega0 * spec_.omega0;
  const double c = 0.5 * spec_.mass * w2;
  const int steps = grid_.substeps - 1;
  const double h = grid_.step(t_f_);
  const double frac = 1.0 / steps;
  double x = 0.0, v = 0.0, j = 0.0;
  for (int i = 0; i + 1 < grid_.nodes; ++i) {
    const double ua = nodes[i], ub = nodes[i + 1];
    for (int s = 0; s < steps; ++s) {
      const double tau = s * frac;
      const double u1 = ua + (ub - ua) * tau;
      const double um = ua + (ub - ua) * (tau + 0.5 * frac);
      const double u4 = ua + (ub - ua) * (tau + frac);
      // k = (x', v', j') at each stage; x' depends on the stage velocity.
      const double k1x = v, k1v = -w2 * u1, k1j = c * u1 * u1;
      const double k2x = v + 0.5 * h * k1v, k2v = -w2 * um, k2j = c * um * um;
      const double k3x = v + 0.5 * h * k2v, k3v = k2v, k3j = k2j;
      const double k4x = v + h * k3v, k4v = -w2 * u4, k4j = c * u4 * u4;
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      j += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
    }
  }
  return {x, v, j};
}

std::vector<double> Transcription::adjoint_gradient(std::span<const double> nodes, double w_qc,
                                                    double w_qc_dot, double w_cost) const {
  if (nodes.size() != static_cast<std::size_t>(grid_.nodes)) {
    throw DomainError("nodes", "expected " + std::to_string(grid_.nodes) + " controller nodes");
  }
  const double w2 = spec_.omega0 * spec_.omega0;
  const double mw2 = spec_.mass * w2;
  const int steps = grid_.substeps - 1;
  const double h = grid_.step(t_f_);
  const double frac = 1.0 / steps;
  std::vector<double> grad(nodes.size(), 0.0);

  // Adjoint of (x, v, j). The dynamics Jacobian is constant (only dx/dt
  // depends on v) and j never feeds back, so lam_j = w_cost throughout.
  double lx = w_qc, lv = w_qc_dot;
  const double lj = w_cost;
  for (int i = grid_.nodes - 2; i >= 0; --i) {
    const double ua = nodes[i], ub = nodes[i + 1];
    for (int s = steps - 1; s >= 0; --s) {
      const double tau = s * frac;
      const double t1 = tau, tm = tau + 0.5 * frac, t4 = tau + frac;
      const double u1 = ua + (ub - ua) * t1;
      const double um = ua + (ub - ua) * tm;
      const double u4 = ua + (ub - ua) * t4;
      // Stage weights b_s = h w_s lam'.
      const double bx1 = h / 6.0 * lx, bx2 = h / 3.0 * lx, bx3 = h / 3.0 * lx, bx4 = h / 6.0 * lx;
      const double bv1 = h / 6.0 * lv, bv2 = h / 3.0 * lv, bv3 = h / 3.0 * lv, bv4 = h / 6.0 * lv;
      const double bj1 = h / 6.0 * lj, bj2 = h / 3.0 * lj, bj3 = h / 3.0 * lj, bj4 = h / 6.0 * lj;
      // Stage 4: k4 = f(z + h k3, u4); f_z^T a = (0, a_x, 0).
      const double a4x = bx4, a4v = bv4, a4j = bj4;
      double dlv = a4x;
      const double gu4 = -w2 * a4v + mw2 * u4 * a4j;
      // Stage 3: k3 = f(z + h/2 k2, um); its adjoint picks up h f_z^T a4.
      const double a3x = bx3, a3v = bv3 + h * a4x, a3j = bj3;
      dlv += a3x;
      double gum = -w2 * a3v + mw2 * um * a3j;
      // Stage 2.
      const double a2x = bx2, a2v = bv2 + 0.5 * h * a3x, a2j = bj2;
      dlv += a2x;
      gum += -w2 * a2v + mw2 * um * a2j;
      // Stage 1.
      const double a1x = bx1, a1v = bv1 + 0.5 * h * a2x, a1j = bj1;
      dlv += a1x;
      const double gu1 = -w2 * a1v + mw2 * u1 * a1j;

      grad[i] += gu1 * (1.0 - t1) + gum * (1.0 - tm) + gu4 * (1.0 - t4);
      grad[i + 1] += gu1 * t1 + gum * tm + gu4 * t4;
      lv += dlv;
    }
  }
  return grad;
}

std::pair<Protocol, double> unbounded_optimum(const TransportSpec& spec, double t_f) {
  validate_spec(spec);
  if (!(std::isfinite(t_f) && t_f > 0.0)) throw DomainError("t_f", "must be finite and > 0");
  const double w = spec.omega0, d = spec.distance;
  const double amp = 6.0 * d / (w * w * t_f * t_f);
  ConstraintSet c;
  c.delta = amp;
  const std::array<double, 2> breaks{0.0, t_f};
  const std::vector<std::vector<double>> pieces{{-amp, 2.0 * amp / t_f}};
  auto p = protocol_from_controller(spec, c, ProtocolKind::Numerical, breaks, pieces, {});
  return {std::move(p), dynamics::energy_lower_bound(spec, t_f)};
}

void validate(const EnergyMinProblem& problem) {
  validate_spec(problem.spec, problem.constraints);
  if (!(std::isfinite(problem.t_f) && problem.t_f > 0.0)) {
    throw DomainError("t_f", "must be finite and > 0");
  }
  if (problem.grid.nodes < 2) throw DomainError("nodes", "N must be >= 2");
  if (problem.grid.substeps < 2) throw DomainError("substeps", "M must be >= 2");
  if (!problem.init.empty() && problem.init.size() != static_cast<std::size_t>(problem.grid.nodes)) {
    throw DomainError("init", "initial controller must have N nodes");
  }
}

namespace {

/// The program in scaled variables y = (x, s): nodes x = u / delta and one
/// slack s_r in [-1, 1] per derivative-bound row, tied by row_r(x) = s_r.
/// Both the terminal conditions and the slack ties enter the augmented
/// Lagrangian; what remains is a box.
class Program {
 public:
  explicit Program(const EnergyMinProblem& p)
      : problem_(p),
        tr_(p.spec, p.t_f, p.grid),
        n_(static_cast<std::size_t>(p.grid.nodes)),
        delta_(p.constraints.delta),
        lower_bound_(dynamics::energy_lower_bound(p.spec, p.t_f)) {
    const double dt = tr_.node_spacing();
    if (p.constraints.epsilon) {
      const double k = delta_ / (*p.constraints.epsilon * dt);
      for (std::size_t i = 0; i + 1 < n_; ++i) rows_.push_back({{{i, -k}, {i + 1, k}}});
    }
    if (p.constraints.zeta) {
      const double k = delta_ / (*p.constraints.zeta * dt * dt);
      for (std::size_t i = 0; i < n_; ++i) {
        Row r;
        if (i > 0) r.terms.push_back({i - 1, k});
        r.terms.push_back({i, -2.0 * k});
        if (i + 1 < n_) r.terms.push_back({i + 1, k});
        rows_.push_back(std::move(r));
      }
    }
    dim_ = n_ + rows_.size();
    lo_.assign(dim_, -1.0);
    hi_.assign(dim_, 1.0);
    if (p.constraints.epsilon) {
      lo_.front() = hi_.front() = 0.0;
      lo_[n_ - 1] = hi_[n_ - 1] = 0.0;
    }
    row_mult_.assign(rows_.size(), 0.0);

    // The objective is quadratic and the terminal conditions are linear in
    // the nodes, so their curvature follows from adjoint gradients once.
    const double d = p.spec.distance;
    const double wj = 1.0 / (p.t_f * lower_bound_);
    const auto n = static_cast<Eigen::Index>(n_);
    objective_hessian_.resize(n, n);
    std::vector<double> unit(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      unit[j] = delta_;
      const auto g = tr_.adjoint_gradient(unit, 0.0, 0.0, wj);
      for (std::size_t i = 0; i < n_; ++i) {
        objective_hessian_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[i] * delta_;
      }
      unit[j] = 0.0;
    }
    objective_hessian_ = 0.5 * (objective_hessian_ + objective_hessian_.transpose()).eval();
    const std::array<std::pair<double, double>, 2> weights{
        {{1.0 / d, 0.0}, {0.0, 1.0 / (d * p.spec.omega0)}}};
    for (int k = 0; k < 2; ++k) {
      const auto g = tr_.adjoint_gradient(unit, weights[k].first, weights[k].second, 0.0);
      eq_grad_[k].resize(n);
      for (std::size_t i = 0; i < n_; ++i) eq_grad_[k](static_cast<Eigen::Index>(i)) = g[i] * delta_;
    }
  }

  std::size_t size() const { return dim_; }
  double lower(std::size_t i) const { return lo_[i]; }
  double upper(std::size_t i) const { return hi_[i]; }

  void project(std::vector<double>& y) const {
    for (std::size_t i = 0; i < dim_; ++i) y[i] = std::clamp(y[i], lo_[i], hi_[i]);
  }

  /// Scaled nodes to the full variable vector, slacks at their best value.
  std::vector<double> lift(std::vector<double> x) const {
    x.resize(dim_);
    for (std::size_t r = 0; r < rows_.size(); ++r) x[n_ + r] = std::clamp(row_value(x, r), -1.0, 1.0);
    project(x);
    return x;
  }

  std::vector<double> to_si(const std::vector<double>& y) const {
    std::vector<double> u(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_));
    for (double& v : u) v *= delta_;
    return u;
  }

  struct Eval {
    double ratio;
    std::array<double, 2> eq;
  };

  Eval evaluate(const std::vector<double>& y) const {
    const auto term = tr_.propagate(to_si(y));
    return {term.cost / (problem_.t_f * lower_bound_),
            {(term.qc - problem_.spec.distance) / problem_.spec.distance,
             term.qc_dot / (problem_.spec.distance * problem_.spec.omega0)}};
  }

  double row_value(const std::vector<double>& y, std::size_t r) const {
    double s = 0.0;
    for (const auto& [idx, coef] : rows_[r].terms) s += coef * y[idx];
    return s;
  }

  /// Augmented Lagrangian value; fills grad if non-null.
  double lagrangian(const std::vector<double>& y, std::vector<double>* grad) const {
    const auto e = evaluate(y);
    double value = e.ratio;
    std::array<double, 2> weight{};
    for (int k = 0; k < 2; ++k) {
      value += eq_mult_[k] * e.eq[k] + 0.5 * penalty_ * e.eq[k] * e.eq[k];
      weight[k] = eq_mult_[k] + penalty_ * e.eq[k];
    }
    std::vector<double> tie(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const double c = row_value(y, r) - y[n_ + r];
      value += row_mult_[r] * c + 0.5 * penalty_ * c * c;
      tie[r] = row_mult_[r] + penalty_ * c;
    }
    if (grad) {
      const double d = problem_.spec.distance;
      const double wj = 1.0 / (problem_.t_f * lower_bound_);
      auto gx = tr_.adjoint_gradient(to_si(y), weight[0] / d,
                                     weight[1] / (d * problem_.spec.omega0), wj);
      grad->assign(dim_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) (*grad)[i] = gx[i] * delta_;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (const auto& [idx, coef] : rows_[r].terms) (*grad)[idx] += tie[r] * coef;
        (*grad)[n_ + r] = -tie[r];
      }
    }
    return value;
  }

  /// Hessian of the augmented Lagrangian; constant for a given penalty.
  Eigen::MatrixXd hessian() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_),
                                              static_cast<Eigen::Index>(dim_));
    h.topLeftCorner(n, n) = objective_hessian_;
    for (const auto& a : eq_grad_) h.topLeftCorner(n, n).noalias() += penalty_ * a * a.transpose();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto sr = static_cast<Eigen::Index>(n_ + r);
      for (const auto& [i, ci] : rows_[r].terms) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (const auto& [j, cj] : rows_[r].terms) {
          h(ii, static_cast<Eigen::Index>(j)) += penalty_ * ci * cj;
        }
        h(ii, sr) -= penalty_ * ci;
        h(sr, ii) -= penalty_ * ci;
      }
      h(sr, sr) += penalty_;
    }
    return h;
  }

  /// Largest violation of the original constraints at the nodes.
  double max_violation(const std::vector<double>& y) const {
    const auto e = evaluate(y);
    double v = std::max(std::abs(e.eq[0]), std::abs(e.eq[1]));
    for (std::size_t i = 0; i < n_; ++i) v = std::max(v, std::abs(y[i]) - 1.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      v = std::max(v, std::abs(row_value(y, r)) - 1.0);
    }
    return std::max(v, 0.0);
  }

  void update_multipliers(const std::vector<double>& y) {
    const auto e = evaluate(y);
    for (int k = 0; k < 2; ++k) eq_mult_[k] += penalty_ * e.eq[k];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      row_mult_[r] += penalty_ * (row_value(y, r) - y[n_ + r]);
    }
  }

  double penalty() const { return penalty_; }
  void set_penalty(double mu) { penalty_ = mu; }

  double projected_gradient_norm(const std::vector<double>& y, const std::vector<double>& g) const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      m = std::max(m, std::abs(std::clamp(y[i] - g[i], lo_[i], hi_[i]) - y[i]));
    }
    return m;
  }

 private:
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
  };

  const EnergyMinProblem& problem_;
  Transcription tr_;
  std::size_t n_;
  std::size_t dim_ = 0;
  double delta_;
  double lower_bound_;
  std::vector<double> lo_, hi_;
  std::vector<Row> rows_;
  std::array<double, 2> eq_mult_{0.0, 0.0};
  std::vector<double> row_mult_;
  double penalty_ = 10.0;
  Eigen::MatrixXd objective_hessian_;
  std::array<Eigen::VectorXd, 2> eq_grad_;
};

/// Projected Newton (two-metric gradient projection) on the box: Newton
/// steps on the free variables, scaled gradient steps on the variables held
/// at a bound, and an Armijo search along the projection arc. Returns the
/// number of iterations used.
int projected_newton(const Program& prog, std::vector<double>& x, double tol, int max_iter) {
  constexpr double kSigma = 1e-4;
  constexpr double kActiveWidth = 1e-3;
  const std::size_t n = x.size();
  prog.project(x);
  std::vector<double> g, trial(n), dir(n);
  double f = prog.lagrangian(x, &g);
  const Eigen::MatrixXd h = prog.hessian();
  Eigen::MatrixXd hf;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double pg = prog.projected_gradient_norm(x, g);
    if (pg <= tol) break;
    const double width = std::min(kActiveWidth, pg);
    std::vector<bool> held(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const bool at_lo = x[i] <= prog.lower(i) + width && g[i] > 0.0;
      const bool at_hi = x[i] >= prog.upper(i) - width && g[i] < 0.0;
      held[i] = at_lo || at_hi || prog.lower(i) == prog.upper(i);
    }
    std::vector<Eigen::Index> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (!held[i]) free.push_back(static_cast<Eigen::Index>(i));
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    hf.resize(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = g[static_cast<std::size_t>(free[a])];
      for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = h(free[a], free[b]);
    }
    Eigen::VectorXd df = Eigen::VectorXd::Zero(nf);
    if (nf > 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(hf);
      if (llt.info() != Eigen::Success) {
        hf.diagonal().array() += 1e-10 * hf.diagonal().cwiseAbs().maxCoeff() + 1e-14;
        llt.compute(hf);
      }
      df = llt.solve(-gf);
    }
    std::fill(dir.begin(), dir.end(), 0.0);
    for (Eigen::Index a = 0; a < nf; ++a) dir[static_cast<std::size_t>(free[a])] = df(a);
    for (std::size_t i = 0; i < n; ++i) {
      if (held[i]) dir[i] = (g[i] > 0.0 ? prog.lower(i) : prog.upper(i)) - x[i];
    }
    double alpha = 1.0, f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * dir[i];
      prog.project(trial);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        decrease += held[i] ? g[i] * (x[i] - trial[i]) : -alpha * g[i] * dir[i];
      }
      f_new = prog.lagrangian(trial, nullptr);
      if (f - f_new >= kSigma * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x.swap(trial);
    f = prog.lagrangian(x, &g);
  }
  return iter;
}

}  // namespace

std::vector<double> default_initial_nodes(const EnergyMinProblem& problem) {
  validate(problem);
  const int n = problem.grid.nodes;
  const double w = problem.spec.omega0, d = problem.spec.distance, t_f = problem.t_f;
  const double amp = 6.0 * d / (w * w * t_f * t_f);
  const double delta = problem.constraints.delta;
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    u[static_cast<std::size_t>(i)] = std::clamp(amp * (2.0 * s - 1.0), -delta, delta);
  }
  if (problem.constraints.epsilon) u.front() = u.back() = 0.0;
  return u;
}

EnergyMinResult minimize_energy(const EnergyMinProblem& problem) {
  validate(problem);
  const auto& cfg = problem.settings;
  if (problem.t_f < analytic::bang_bang_time(problem.spec, problem.constraints.delta)) {
    throw Infeasible("t_f below the minimal transport time for |u| <= delta");
  }
  Program prog(problem);
  std::vector<double> x = problem.init.empty() ? default_initial_nodes(problem) : problem.init;
  for (double& v : x) v /= problem.constraints.delta;
  x = prog.lift(std::move(x));
  prog.set_penalty(cfg.penalty_init);

  EnergyMinReport report;
  std::vector<double> best;
  double best_ratio = std::numeric_limits<double>::infinity();
  double best_violation = 0.0;
  double prev_violation = std::numeric_limits<double>::infinity();
  bool stationary = false;

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    report.outer_iterations = outer;
    const double inner_tol = std::max(cfg.optimality_tol, std::pow(0.1, outer + 1));
    report.inner_iterations += projected_newton(prog, x, inner_tol, cfg.max_inner);
    const double viol = prog.max_violation(x);
    const double ratio = prog.evaluate(x).ratio;
    if (viol <= cfg.accept_tol && (best.empty() || viol <= cfg.feasibility_tol || ratio < best_ratio)) {
      best = x;
      best_ratio = ratio;
      best_violation = viol;
    }
    std::vector<double> g;
    prog.lagrangian(x, &g);
    const bool kkt = prog.projected_gradient_norm(x, g) <= cfg.optimality_tol * 10.0;
    if (viol <= cfg.feasibility_tol && kkt) {
      stationary = true;
      break;
    }
    prog.update_multipliers(x);
    if (viol > 0.25 * prev_violation) {
      prog.set_penalty(std::min(prog.penalty() * cfg.penalty_growth, cfg.penalty_max));
    }
    prev_violation = viol;
  }

  if (best.empty()) {
    throw Infeasible("no iterate met the constraints to " + std::to_string(cfg.accept_tol) +
                     " (last violation " + std::to_string(prog.max_violation(x)) + ")");
  }
  if (!stationary && best_violation > cfg.feasibility_tol) {
    throw NoConvergence("augmented Lagrangian did not reach a stationary feasible point");
  }

  report.nodes = prog.to_si(best);
  report.max_violation = best_violation;
  report.lower_bound = dynamics::energy_lower_bound(problem.spec, problem.t_f);

  const double dt = problem.t_f / (problem.grid.nodes - 1);
  std::vector<double> breaks(report.nodes.size());
  for (std::size_t i = 0; i < breaks.size(); ++i) breaks[i] = dt * static_cast<double>(i);
  breaks.back() = problem.t_f;
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i + 1 < report.nodes.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    pieces.push_back({report.nodes[i], (report.nodes[i + 1] - report.nodes[i]) / len});
  }
  auto protocol = protocol_from_controller(problem.spec, problem.constraints,
                                           ProtocolKind::Numerical, breaks, pieces, {});
  const double energy = dynamics::avg_potential_energy(protocol);
  report.ratio = energy / report.lower_bound;
  report.objective_gap = std::abs(report.ratio - best_ratio);
  return {std::move(protocol), energy, std::move(report)};
}

}  // namespace sbb::energymin
