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

#ifndef SBB_SBB_H_
#define SBB_SBB_H_

/*
 * C interface to the smooth bang-bang transport library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an sbb_status; on
 * failure sbb_last_error() describes the problem for the calling thread.
 * Quantities are SI unless a name says otherwise.
 */

#include <stddef.h>

#if defined(_WIN32)
#define SBB_API __declspec(dllexport)
#elif defined(SBB_BUILDING_LIBRARY)
#define SBB_API __attribute__((visibility("default")))
#else
#define SBB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sbb_status {
  SBB_OK = 0,
  SBB_ERR_DOMAIN = 1,
  SBB_ERR_REGIME = 2,
  SBB_ERR_OUT_OF_RANGE = 3,
  SBB_ERR_EVALUATION = 4,
  SBB_ERR_SINGULAR_JACOBIAN = 5,
  SBB_ERR_NO_CONVERGENCE = 6,
  SBB_ERR_INFEASIBLE = 7,
  SBB_ERR_PARSE = 8,
  SBB_ERR_INVALID_ARGUMENT = 9,
  SBB_ERR_INTERNAL = 10
} sbb_status;

typedef enum sbb_protocol_kind {
  SBB_KIND_BANG_BANG = 0,
  SBB_KIND_VEL_BOUNDED = 1,
  SBB_KIND_ACC_BOUNDED = 2,
  SBB_KIND_POLYNOMIAL_ANSATZ = 3,
  SBB_KIND_NUMERICAL = 4
} sbb_protocol_kind;

typedef struct sbb_transport_spec {
  double mass;     /* kg */
  double omega0;   /* rad/s */
  double distance; /* m */
  double hbar;     /* J*s */
} sbb_transport_spec;

typedef struct sbb_constraints {
  double delta; /* m */
  int has_epsilon;
  double epsilon; /* m/s */
  int has_zeta;
  double zeta; /* m/s^2 */
} sbb_constraints;

typedef struct sbb_sample {
  double u;
  double qc;
  double q0;
  double qc_dot;
} sbb_sample;

typedef struct sbb_protocol sbb_protocol;
typedef struct sbb_metrics sbb_metrics;
typedef struct sbb_shooting_result sbb_shooting_result;
typedef struct sbb_energymin_result sbb_energymin_result;

/* Thread-local description of the last failure; never NULL. */
SBB_API const char* sbb_last_error(void);
SBB_API const char* sbb_status_name(sbb_status status);

/* Rb-87 mass and the reduced Planck constant with the given frequency/distance. */
SBB_API sbb_transport_spec sbb_default_spec(double omega0, double distance);
SBB_API sbb_constraints sbb_constraints_from_ratios(const sbb_transport_spec* spec,
                                                    double delta_ratio, int has_epsilon,
                                                    double epsilon_ratio, int has_zeta,
                                                    double zeta_ratio);
SBB_API sbb_status sbb_validate(const sbb_transport_spec* spec, const sbb_constraints* c);

/* ---- analytic protocols ------------------------------------------------- */

SBB_API sbb_status sbb_near_minimal_time(const sbb_transport_spec* spec, const sbb_constraints* c,
                                         double* t_f);
/* Picks bang-bang, velocity- or acceleration-bounded from the bounds present. */
SBB_API sbb_status sbb_design(const sbb_transport_spec* spec, const sbb_constraints* c,
                              sbb_protocol** out);
SBB_API sbb_status sbb_design_polynomial_ansatz(const sbb_transport_spec* spec, double t_f,
                                                sbb_protocol** out);
SBB_API sbb_status sbb_unbounded_optimum(const sbb_transport_spec* spec, double t_f,
                                         sbb_protocol** out, double* energy);
SBB_API int sbb_acc_bounded_regime_valid(const sbb_transport_spec* spec, const sbb_constraints* c);

/* ---- protocol handles --------------------------------------------------- */

SBB_API void sbb_protocol_free(sbb_protocol* p);
SBB_API sbb_protocol_kind sbb_protocol_get_kind(const sbb_protocol* p);
SBB_API double sbb_protocol_t_f(const sbb_protocol* p);
SBB_API sbb_transport_spec sbb_protocol_spec(const sbb_protocol* p);
/* Writes up to cap times; *count receives the total number available. */
SBB_API sbb_status sbb_protocol_switch_times(const sbb_protocol* p, double* times, size_t cap,
                                             size_t* count);
/* NULL when the protocol carries no regime warning. */
SBB_API const char* sbb_protocol_warning(const sbb_protocol* p);
SBB_API sbb_status sbb_protocol_eval(const sbb_protocol* p, double t, sbb_sample* out);

/* Serialized JSON document; release with sbb_string_free. */
SBB_API sbb_status sbb_protocol_to_json(const sbb_protocol* p, char** json);
SBB_API sbb_status sbb_protocol_from_json(const char* json, sbb_protocol** out);
SBB_API void sbb_string_free(char* s);

/* ---- metrics ------------------------------------------------------------ */

SBB_API sbb_status sbb_avg_potential_energy(const sbb_protocol* p, double* energy);
SBB_API double sbb_energy_lower_bound(const sbb_transport_spec* spec, double t_f);
SBB_API sbb_status sbb_sloshing_amplitude(const sbb_protocol* p, int panels, double* amplitude);
SBB_API sbb_status sbb_instantaneous_energy(const sbb_protocol* p, double t, int n, double* e);
SBB_API sbb_status sbb_lr_phase(const sbb_protocol* p, double t, int n, double* phase);

/* steps <= 0 selects the default of 10000 RK4 steps. */
SBB_API sbb_status sbb_verify(const sbb_protocol* p, int steps, int mode, sbb_metrics** out);
SBB_API void sbb_metrics_free(sbb_metrics* m);
SBB_API int sbb_metrics_passed(const sbb_metrics* m);
SBB_API double sbb_metrics_avg_potential_energy(const sbb_metrics* m);
SBB_API double sbb_metrics_sloshing_amplitude(const sbb_metrics* m);
SBB_API double sbb_metrics_final_excess_energy(const sbb_metrics* m);
SBB_API sbb_status sbb_metrics_to_json(const sbb_metrics* m, char** json);

/* ---- multiple shooting -------------------------------------------------- */

#define SBB_SHOOTING_UNKNOWNS 11

typedef struct sbb_shooting_options {
  double rho;     /* update rate in (0, 1] */
  double tol;     /* dimensionless residual norm */
  int max_iter;
  double fd_step; /* s */
} sbb_shooting_options;

SBB_API sbb_shooting_options sbb_shooting_default_options(void);
/* guess: t1..t10, t_f in seconds; NULL selects {5, 10, ..., 55} ms. */
SBB_API sbb_status sbb_shoot(const sbb_transport_spec* spec, const sbb_constraints* c,
                             const double* guess, const sbb_shooting_options* options,
                             sbb_shooting_result** out);
SBB_API void sbb_shooting_result_free(sbb_shooting_result* r);
SBB_API int sbb_shooting_converged(const sbb_shooting_result* r);
SBB_API int sbb_shooting_iterations(const sbb_shooting_result* r);
SBB_API double sbb_shooting_residual_norm(const sbb_shooting_result* r);
SBB_API void sbb_shooting_solution(const sbb_shooting_result* r, double* times);
SBB_API size_t sbb_shooting_history_size(const sbb_shooting_result* r);
SBB_API sbb_status sbb_shooting_history_entry(const sbb_shooting_result* r, size_t index,
                                              int* iteration, double* residual_norm,
                                              double* times);
SBB_API sbb_status sbb_shooting_protocol(const sbb_shooting_result* r, sbb_protocol** out);

/* ---- energy minimization ------------------------------------------------ */

typedef struct sbb_energymin_options {
  int nodes;    /* N */
  int substeps; /* M */
  int max_outer;
  int max_inner;
  double feasibility_tol;
} sbb_energymin_options;

SBB_API sbb_energymin_options sbb_energymin_default_options(void);
/* init may be NULL (clipped linear controller) or point to `nodes` values. */
SBB_API sbb_status sbb_minimize_energy(const sbb_transport_spec* spec, const sbb_constraints* c,
                                       double t_f, const sbb_energymin_options* options,
                                       const double* init, sbb_energymin_result** out);
SBB_API void sbb_energymin_result_free(sbb_energymin_result* r);
SBB_API double sbb_energymin_ratio(const sbb_energymin_result* r);
SBB_API double sbb_energymin_avg_potential_energy(const sbb_energymin_result* r);
SBB_API double sbb_energymin_lower_bound(const sbb_energymin_result* r);
SBB_API double sbb_energymin_max_violation(const sbb_energymin_result* r);
SBB_API int sbb_energymin_outer_iterations(const sbb_energymin_result* r);
SBB_API size_t sbb_energymin_nodes(const sbb_energymin_result* r, double* nodes, size_t cap);
SBB_API sbb_status sbb_energymin_protocol(const sbb_energymin_result* r, sbb_protocol** out);

#ifdef __cplusplus
}
#endif

#endif /* SBB_SBB_H_ */
