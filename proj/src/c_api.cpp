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

#include "sbb/sbb.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "sbb/analytic.hpp"
#include "sbb/dynamics.hpp"
#include "sbb/energymin.hpp"
#include "sbb/errors.hpp"
#include "sbb/protocol_io.hpp"
#include "sbb/shooting.hpp"

struct sbb_protocol {
  sbb::Protocol value;
};

struct sbb_metrics {
  sbb::dynamics::MetricsReport value;
};

struct sbb_shooting_result {
  sbb::shooting::ShootingProblem problem;
  sbb::shooting::ShootingResult value;
};

struct sbb_energymin_result {
  sbb::energymin::EnergyMinResult value;
};

namespace {

thread_local std::string g_last_error;

sbb_status fail(sbb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
sbb_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SBB_OK;
  } catch (const sbb::DomainError& e) {
    return fail(SBB_ERR_DOMAIN, e.what());
  } catch (const sbb::RegimeError& e) {
    return fail(SBB_ERR_REGIME, e.what());
  } catch (const sbb::OutOfRange& e) {
    return fail(SBB_ERR_OUT_OF_RANGE, e.what());
  } catch (const sbb::EvaluationError& e) {
    return fail(SBB_ERR_EVALUATION, e.what());
  } catch (const sbb::SingularJacobian& e) {
    return fail(SBB_ERR_SINGULAR_JACOBIAN, e.what());
  } catch (const sbb::NoConvergence& e) {
    return fail(SBB_ERR_NO_CONVERGENCE, e.what());
  } catch (const sbb::Infeasible& e) {
    return fail(SBB_ERR_INFEASIBLE, e.what());
  } catch (const sbb::ParseError& e) {
    return fail(SBB_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SBB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SBB_ERR_INTERNAL, e.what());
  }
}

sbb::TransportSpec to_cpp(const sbb_transport_spec& s) {
  return {s.mass, s.omega0, s.distance, s.hbar};
}

sbb_transport_spec to_c(const sbb::TransportSpec& s) {
  return {s.mass, s.omega0, s.distance, s.hbar};
}

sbb::ConstraintSet to_cpp(const sbb_constraints& c) {
  sbb::ConstraintSet out;
  out.delta = c.delta;
  if (c.has_epsilon) out.epsilon = c.epsilon;
  if (c.has_zeta) out.zeta = c.zeta;
  return out;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define SBB_REQUIRE(cond)                                                    \
  do {                                                                       \
    if (!(cond)) return fail(SBB_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* sbb_last_error(void) { return g_last_error.c_str(); }

const char* sbb_status_name(sbb_status status) {
  switch (status) {
    case SBB_OK: return "ok";
    case SBB_ERR_DOMAIN: return "domain error";
    case SBB_ERR_REGIME: return "regime error";
    case SBB_ERR_OUT_OF_RANGE: return "out of range";
    case SBB_ERR_EVALUATION: return "evaluation error";
    case SBB_ERR_SINGULAR_JACOBIAN: return "singular jacobian";
    case SBB_ERR_NO_CONVERGENCE: return "no convergence";
    case SBB_ERR_INFEASIBLE: return "infeasible";
    case SBB_ERR_PARSE: return "parse error";
    case SBB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SBB_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

sbb_transport_spec sbb_default_spec(double omega0, double distance) {
  return {sbb::kRubidium87Mass, omega0, distance, sbb::kHbar};
}

sbb_constraints sbb_constraints_from_ratios(const sbb_transport_spec* spec, double delta_ratio,
                                            int has_epsilon, double epsilon_ratio, int has_zeta,
                                            double zeta_ratio) {
  sbb_constraints out{};
  if (!spec) return out;
  const auto c = sbb::constraints_from_ratios(
      to_cpp(*spec), delta_ratio, has_epsilon ? std::optional<double>(epsilon_ratio) : std::nullopt,
      has_zeta ? std::optional<double>(zeta_ratio) : std::nullopt);
  out.delta = c.delta;
  out.has_epsilon = c.epsilon.has_value();
  out.epsilon = c.epsilon.value_or(0.0);
  out.has_zeta = c.zeta.has_value();
  out.zeta = c.zeta.value_or(0.0);
  return out;
}

sbb_status sbb_validate(const sbb_transport_spec* spec, const sbb_constraints* c) {
  SBB_REQUIRE(spec && c);
  return guarded([&] { sbb::validate_spec(to_cpp(*spec), to_cpp(*c)); });
}

sbb_status sbb_near_minimal_time(const sbb_transport_spec* spec, const sbb_constraints* c,
                                 double* t_f) {
  SBB_REQUIRE(spec && c && t_f);
  return guarded([&] { *t_f = sbb::analytic::near_minimal_time(to_cpp(*spec), to_cpp(*c)); });
}

sbb_status sbb_design(const sbb_transport_spec* spec, const sbb_constraints* c,
                      sbb_protocol** out) {
  SBB_REQUIRE(spec && c && out);
  return guarded([&] {
    *out = new sbb_protocol{sbb::analytic::design(to_cpp(*spec), to_cpp(*c))};
  });
}

sbb_status sbb_design_polynomial_ansatz(const sbb_transport_spec* spec, double t_f,
                                        sbb_protocol** out) {
  SBB_REQUIRE(spec && out);
  return guarded([&] {
    *out = new sbb_protocol{sbb::analytic::polynomial_ansatz(to_cpp(*spec), t_f)};
  });
}

sbb_status sbb_unbounded_optimum(const sbb_transport_spec* spec, double t_f, sbb_protocol** out,
                                 double* energy) {
  SBB_REQUIRE(spec && out);
  return guarded([&] {
    auto [p, e] = sbb::energymin::unbounded_optimum(to_cpp(*spec), t_f);
    if (energy) *energy = e;
    *out = new sbb_protocol{std::move(p)};
  });
}

int sbb_acc_bounded_regime_valid(const sbb_transport_spec* spec, const sbb_constraints* c) {
  if (!spec || !c || !c->has_epsilon || !c->has_zeta) return 0;
  int valid = 0;
  guarded([&] {
    valid = sbb::analytic::acc_bounded_regime_valid(to_cpp(*spec), c->delta, c->epsilon, c->zeta);
  });
  return valid;
}

void sbb_protocol_free(sbb_protocol* p) { delete p; }

sbb_protocol_kind sbb_protocol_get_kind(const sbb_protocol* p) {
  switch (p->value.kind()) {
    case sbb::ProtocolKind::BangBang: return SBB_KIND_BANG_BANG;
    case sbb::ProtocolKind::VelBounded: return SBB_KIND_VEL_BOUNDED;
    case sbb::ProtocolKind::AccBounded: return SBB_KIND_ACC_BOUNDED;
    case sbb::ProtocolKind::PolynomialAnsatz: return SBB_KIND_POLYNOMIAL_ANSATZ;
    case sbb::ProtocolKind::Numerical: return SBB_KIND_NUMERICAL;
  }
  return SBB_KIND_NUMERICAL;
}

double sbb_protocol_t_f(const sbb_protocol* p) { return p->value.t_f(); }

sbb_transport_spec sbb_protocol_spec(const sbb_protocol* p) { return to_c(p->value.spec()); }

sbb_status sbb_protocol_switch_times(const sbb_protocol* p, double* times, size_t cap,
                                     size_t* count) {
  SBB_REQUIRE(p && count);
  const auto& st = p->value.switch_times();
  *count = st.size();
  if (times) std::copy_n(st.begin(), std::min(cap, st.size()), times);
  return SBB_OK;
}

const char* sbb_protocol_warning(const sbb_protocol* p) {
  const auto& w = p->value.regime_warning();
  return w ? w->c_str() : nullptr;
}

sbb_status sbb_protocol_eval(const sbb_protocol* p, double t, sbb_sample* out) {
  SBB_REQUIRE(p && out);
  return guarded([&] {
    const auto s = sbb::eval_protocol(p->value, t);
    *out = {s.u, s.qc, s.q0, s.qc_dot};
  });
}

sbb_status sbb_protocol_to_json(const sbb_protocol* p, char** json) {
  SBB_REQUIRE(p && json);
  return guarded([&] { *json = copy_string(sbb::io::protocol_to_json(p->value)); });
}

sbb_status sbb_protocol_from_json(const char* json, sbb_protocol** out) {
  SBB_REQUIRE(json && out);
  return guarded([&] { *out = new sbb_protocol{sbb::io::protocol_from_json(json)}; });
}

void sbb_string_free(char* s) { delete[] s; }

sbb_status sbb_avg_potential_energy(const sbb_protocol* p, double* energy) {
  SBB_REQUIRE(p && energy);
  return guarded([&] { *energy = sbb::dynamics::avg_potential_energy(p->value); });
}

double sbb_energy_lower_bound(const sbb_transport_spec* spec, double t_f) {
  double out = 0.0;
  if (!spec) return out;
  guarded([&] { out = sbb::dynamics::energy_lower_bound(to_cpp(*spec), t_f); });
  return out;
}

sbb_status sbb_sloshing_amplitude(const sbb_protocol* p, int panels, double* amplitude) {
  SBB_REQUIRE(p && amplitude);
  return guarded([&] { *amplitude = sbb::dynamics::sloshing_amplitude(p->value, panels); });
}

sbb_status sbb_instantaneous_energy(const sbb_protocol* p, double t, int n, double* e) {
  SBB_REQUIRE(p && e);
  return guarded([&] { *e = sbb::dynamics::instantaneous_energy(p->value, t, n); });
}

sbb_status sbb_lr_phase(const sbb_protocol* p, double t, int n, double* phase) {
  SBB_REQUIRE(p && phase);
  return guarded([&] { *phase = sbb::dynamics::lr_phase(p->value, t, n); });
}

sbb_status sbb_verify(const sbb_protocol* p, int steps, int mode, sbb_metrics** out) {
  SBB_REQUIRE(p && out);
  return guarded([&] {
    sbb::dynamics::VerifyOptions opt;
    if (steps > 0) opt.steps = steps;
    opt.mode = mode;
    *out = new sbb_metrics{sbb::dynamics::verify_protocol(p->value, opt)};
  });
}

void sbb_metrics_free(sbb_metrics* m) { delete m; }
int sbb_metrics_passed(const sbb_metrics* m) { return m->value.passed() ? 1 : 0; }
double sbb_metrics_avg_potential_energy(const sbb_metrics* m) { return m->value.avg_potential_energy; }
double sbb_metrics_sloshing_amplitude(const sbb_metrics* m) { return m->value.sloshing_amplitude; }
double sbb_metrics_final_excess_energy(const sbb_metrics* m) { return m->value.final_excess_energy; }

sbb_status sbb_metrics_to_json(const sbb_metrics* m, char** json) {
  SBB_REQUIRE(m && json);
  return guarded([&] { *json = copy_string(sbb::io::metrics_to_json(m->value)); });
}

sbb_shooting_options sbb_shooting_default_options(void) {
  const sbb::shooting::ShootingProblem d;
  return {d.rho, d.tol, d.max_iter, d.fd_step};
}

sbb_status sbb_shoot(const sbb_transport_spec* spec, const sbb_constraints* c, const double* guess,
                     const sbb_shooting_options* options, sbb_shooting_result** out) {
  SBB_REQUIRE(spec && c && out);
  return guarded([&] {
    sbb::shooting::ShootingProblem problem;
    problem.spec = to_cpp(*spec);
    problem.constraints = to_cpp(*c);
    problem.guess = sbb::shooting::default_guess();
    if (guess) std::copy_n(guess, sbb::shooting::kUnknowns, problem.guess.begin());
    if (options) {
      problem.rho = options->rho;
      problem.tol = options->tol;
      problem.max_iter = options->max_iter;
      problem.fd_step = options->fd_step;
    }
    auto result = sbb::shooting::solve(problem);
    *out = new sbb_shooting_result{problem, std::move(result)};
  });
}

void sbb_shooting_result_free(sbb_shooting_result* r) { delete r; }
int sbb_shooting_converged(const sbb_shooting_result* r) { return r->value.converged ? 1 : 0; }
int sbb_shooting_iterations(const sbb_shooting_result* r) { return r->value.iterations; }
double sbb_shooting_residual_norm(const sbb_shooting_result* r) { return r->value.residual_norm; }

void sbb_shooting_solution(const sbb_shooting_result* r, double* times) {
  std::copy(r->value.solution.begin(), r->value.solution.end(), times);
}

size_t sbb_shooting_history_size(const sbb_shooting_result* r) { return r->value.history.size(); }

sbb_status sbb_shooting_history_entry(const sbb_shooting_result* r, size_t index, int* iteration,
                                      double* residual_norm, double* times) {
  SBB_REQUIRE(r);
  if (index >= r->value.history.size()) return fail(SBB_ERR_OUT_OF_RANGE, "history index");
  const auto& h = r->value.history[index];
  if (iteration) *iteration = h.iteration;
  if (residual_norm) *residual_norm = h.residual_norm;
  if (times) std::copy(h.g.begin(), h.g.end(), times);
  return SBB_OK;
}

sbb_status sbb_shooting_protocol(const sbb_shooting_result* r, sbb_protocol** out) {
  SBB_REQUIRE(r && out);
  return guarded([&] {
    *out = new sbb_protocol{sbb::shooting::to_protocol(r->problem, r->value.solution)};
  });
}

sbb_energymin_options sbb_energymin_default_options(void) {
  const sbb::energymin::TranscriptionGrid g;
  const sbb::energymin::OptimizerSettings s;
  return {g.nodes, g.substeps, s.max_outer, s.max_inner, s.feasibility_tol};
}

sbb_status sbb_minimize_energy(const sbb_transport_spec* spec, const sbb_constraints* c,
                               double t_f, const sbb_energymin_options* options,
                               const double* init, sbb_energymin_result** out) {
  SBB_REQUIRE(spec && c && out);
  return guarded([&] {
    sbb::energymin::EnergyMinProblem problem;
    problem.spec = to_cpp(*spec);
    problem.constraints = to_cpp(*c);
    problem.t_f = t_f;
    if (options) {
      problem.grid.nodes = options->nodes;
      problem.grid.substeps = options->substeps;
      problem.settings.max_outer = options->max_outer;
      problem.settings.max_inner = options->max_inner;
      problem.settings.feasibility_tol = options->feasibility_tol;
    }
    if (init && problem.grid.nodes > 0) {
      problem.init.assign(init, init + problem.grid.nodes);
    }
    *out = new sbb_energymin_result{sbb::energymin::minimize_energy(problem)};
  });
}

void sbb_energymin_result_free(sbb_energymin_result* r) { delete r; }
double sbb_energymin_ratio(const sbb_energymin_result* r) { return r->value.report.ratio; }
double sbb_energymin_avg_potential_energy(const sbb_energymin_result* r) {
  return r->value.avg_potential_energy;
}
double sbb_energymin_lower_bound(const sbb_energymin_result* r) {
  return r->value.report.lower_bound;
}
double sbb_energymin_max_violation(const sbb_energymin_result* r) {
  return r->value.report.max_violation;
}
int sbb_energymin_outer_iterations(const sbb_energymin_result* r) {
  return r->value.report.outer_iterations;
}

size_t sbb_energymin_nodes(const sbb_energymin_result* r, double* nodes, size_t cap) {
  const auto& n = r->value.report.nodes;
  if (nodes) std::copy_n(n.begin(), std::min(cap, n.size()), nodes);
  return n.size();
}

sbb_status sbb_energymin_protocol(const sbb_energymin_result* r, sbb_protocol** out) {
  SBB_REQUIRE(r && out);
  return guarded([&] { *out = new sbb_protocol{r->value.protocol}; });
}

}  // extern "C"
