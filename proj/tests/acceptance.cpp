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

// Acceptance runner: one PASS/FAIL line per criterion, details indented below.
// Usage: sbb_acceptance [--only N]...

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdarg>
#include <cstring>
#include <functional>
#include <random>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "sbb/analytic.hpp"
#include "sbb/dynamics.hpp"
#include "sbb/energymin.hpp"
#include "sbb/errors.hpp"
#include "sbb/shooting.hpp"
#include "support.hpp"

using namespace sbb;
using namespace sbb::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void note(bool ok, const char* format, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    details.push_back(std::string(ok ? "ok    " : "MISS  ") + buf);
    pass = pass && ok;
  }
  void info(const std::string& text) { details.push_back("info  " + text); }
};

constexpr std::uint64_t kSeed = 0x5bb2024ULL;
constexpr int kDraws = 120;

ConstraintSet ratios(double dr, std::optional<double> er = {}, std::optional<double> zr = {}) {
  return constraints_from_ratios(reference_spec(), dr, er, zr);
}

// ---------------------------------------------------------------------------

Outcome minimal_times() {
  Outcome o;
  const auto s = reference_spec();
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    ConstraintSet c;
    double expected;
  } cases[] = {
      {"bang-bang", ratios(0.1), 50.3},
      {"vel (0.1, 0.1)", ratios(0.1, 0.1), 58.9},
      {"vel (0.1, 0.05)", ratios(0.1, 0.05), 68.7},
      {"acc (0.1, 0.1, 0.5)", ratios(0.1, 0.1, 0.5), 60.5},
      {"acc (0.1, 0.2, 1)", ratios(0.1, 0.2, 1.0), 56.1},
      {"acc (0.1, 0.5, 2)", ratios(0.1, 0.5, 2.0), 53.9},
  };
  for (const auto& c : cases) {
    const double ms = analytic::design(s, c.c).t_f() * 1e3;
    o.note(std::abs(ms - c.expected) <= 0.1, "%-20s t_f = %.3f ms (expected %.1f +/- 0.1)", c.name, ms,
           c.expected);
  }
  o.info("runtime " + std::to_string(seconds_since(t0) * 1e3) + " ms");
  return o;
}

std::vector<Protocol> valid_analytic_protocols() {
  const auto s = reference_spec();
  std::vector<Protocol> out;
  for (const auto& c : {ratios(0.1), ratios(0.1, 0.1), ratios(0.1, 0.05), ratios(0.1, 0.1, 0.5),
                        ratios(0.1, 0.2, 1.0)}) {
    out.push_back(analytic::design(s, c));
  }
  RatioGenerator gen(kSeed);
  for (int i = 0; i < kDraws; ++i) {
    const auto c = from_ratios(s, gen.valid_acc(s));
    out.push_back(analytic::bang_bang(s, c.delta));
    out.push_back(analytic::vel_bounded(s, c.delta, *c.epsilon));
    out.push_back(analytic::acc_bounded(s, c.delta, *c.epsilon, *c.zeta));
  }
  return out;
}

Outcome oracle_chain() {
  Outcome o;
  const auto s = reference_spec();
  const double d = s.distance, w = s.omega0;
  double worst_pos = 0.0, worst_vel = 0.0, slowest = 0.0;
  const auto ps = valid_analytic_protocols();
  for (const auto& p : ps) {
    if (p.regime_warning()) continue;
    const auto t0 = Clock::now();
    const auto traj = dynamics::integrate_auxiliary(p, 10000);
    slowest = std::max(slowest, seconds_since(t0));
    worst_pos = std::max(worst_pos, std::abs(traj.back().qc - d) / d);
    worst_vel = std::max(worst_vel, std::abs(traj.back().qc_dot) / (d * w));
  }
  o.note(worst_pos < 1e-8, "max |qc(t_f) - d| / d = %.2e over %zu protocols (< 1e-8)", worst_pos, ps.size());
  o.note(worst_vel < 1e-8, "max |qc'(t_f)| / (d w0) = %.2e (< 1e-8)", worst_vel);
  o.note(slowest < 1.0, "slowest integration %.4f s (< 1 s)", slowest);
  return o;
}

Outcome shooting_reproduction() {
  Outcome o;
  shooting::ShootingProblem p;
  p.spec = reference_spec();
  p.constraints = ratios(0.1, 0.1, 0.5);
  p.guess = shooting::default_guess();
  p.rho = 0.5;
  const auto t0 = Clock::now();
  try {
    const auto r = shooting::solve(p);
    const double elapsed = seconds_since(t0);
    const auto sch = analytic::acc_bounded_schedule(p.spec, p.constraints.delta, *p.constraints.epsilon,
                                                    *p.constraints.zeta);
    double err = std::abs(r.solution[10] - sch.t_f);
    for (std::size_t i = 0; i < 10; ++i) err = std::max(err, std::abs(r.solution[i] - sch.times[i]));
    o.note(r.converged, "converged, |f| = %.2e (tol %.0e)", r.residual_norm, p.tol);
    o.note(r.iterations >= 10 && r.iterations <= 20, "iterations = %d (accepted 10-20)", r.iterations);
    o.note(err < 1e-6, "max switching-time error = %.2e s (< 1e-6)", err);
    o.note(elapsed < 1.0, "runtime %.4f s (< 1 s)", elapsed);
  } catch (const std::exception& e) {
    o.note(false, "solver threw: %s", e.what());
  }
  return o;
}

struct EnergyRun {
  double ratio = 0.0;
  double violation = 0.0;
};
std::vector<EnergyRun> g_energy_runs;

Outcome energy_ratios() {
  Outcome o;
  const auto s = reference_spec();
  struct Case {
    const char* label;
    ConstraintSet c;
    double expected, tol;
  } cases[] = {{"4a delta", ratios(0.1), 1.0002, 0.01},
               {"4b delta, epsilon", ratios(0.1, 0.1), 1.4918, 0.02},
               {"4c delta, epsilon, zeta", ratios(0.1, 0.1, 0.5), 1.6099, 0.02}};
  for (const auto& c : cases) {
    energymin::EnergyMinProblem p;
    p.spec = s;
    p.constraints = c.c;
    p.t_f = 0.06;
    p.grid = {100, 10};
    const auto t0 = Clock::now();
    // default start first; on a miss, four more starts and the best feasible value
    std::vector<std::vector<double>> starts{{}};
    double best = NAN, best_viol = NAN;
    std::string tried;
    for (std::size_t k = 0; k < 5; ++k) {
      if (k == 1) {
        if (std::abs(best / c.expected - 1) <= c.tol) break;
        const auto base = energymin::default_initial_nodes(p);
        std::vector<double> half(base), zero(base.size(), 0.0);
        for (auto& v : half) v *= 0.5;
        starts.push_back(zero);
        starts.push_back(half);
        std::mt19937_64 rng(kSeed + 4);
        std::uniform_real_distribution<double> uni(-c.c.delta, c.c.delta);
        for (int r = 0; r < 2; ++r) {
          std::vector<double> x(base.size());
          for (auto& v : x) v = uni(rng);
          starts.push_back(x);
        }
      }
      if (k >= starts.size()) break;
      p.init = starts[k];
      try {
        const auto r = energymin::minimize_energy(p);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s%.6f", tried.empty() ? "" : ", ", r.report.ratio);
        tried += buf;
        if (std::isnan(best) || r.report.ratio < best) {
          best = r.report.ratio;
          best_viol = r.report.max_violation;
        }
        g_energy_runs.push_back({r.report.ratio, r.report.max_violation});
      } catch (const std::exception& e) {
        tried += std::string(tried.empty() ? "" : ", ") + "threw (" + e.what() + ")";
      }
    }
    const double rel = best / c.expected - 1;
    o.note(!std::isnan(best) && std::abs(rel) <= c.tol,
           "%-24s ratio = %.6f (expected %.4f +/- %.0f%%, off %+.2f%%), viol %.1e, %.1f s", c.label, best,
           c.expected, c.tol * 100, rel * 100, best_viol, seconds_since(t0));
    if (starts.size() > 1) o.info(std::string(c.label) + ": ratios over " + std::to_string(starts.size()) + " starts: " + tried);
  }
  return o;
}

Outcome lower_bound() {
  Outcome o;
  const auto s = reference_spec();
  auto ps = valid_analytic_protocols();
  RatioGenerator gen(kSeed + 1);
  for (int i = 0; i < 20; ++i) {
    const auto c = from_ratios(s, gen.valid_acc(s));
    const double t_f = analytic::acc_bounded_time(s, c.delta, *c.epsilon, *c.zeta);
    ps.push_back(analytic::polynomial_ansatz(s, t_f));
    ps.push_back(analytic::acc_bounded(s, c.delta, 0.5 * s.distance * s.omega0, 2.0 * s.distance * s.omega0 * s.omega0));
  }
  {
    shooting::ShootingProblem p;
    p.spec = s;
    p.constraints = ratios(0.1, 0.1, 0.5);
    p.guess = shooting::default_guess();
    p.tol = 1e-10;
    ps.push_back(shooting::to_protocol(p, shooting::solve(p).solution));
  }
  double worst = INFINITY;
  for (const auto& p : ps) {
    worst = std::min(worst, dynamics::avg_potential_energy(p) / dynamics::energy_lower_bound(s, p.t_f()));
  }
  o.note(worst >= 1.0, "min Ep / bound over %zu protocols = %.6f (>= 1)", ps.size(), worst);

  double eq = 0.0;
  for (double t_f : {0.03, 0.045, 0.06, 0.1, 0.5}) {
    const auto [p, ep] = energymin::unbounded_optimum(s, t_f);
    const double lb = dynamics::energy_lower_bound(s, t_f);
    eq = std::max({eq, std::abs(ep / lb - 1), std::abs(dynamics::avg_potential_energy(p) / lb - 1)});
  }
  o.note(eq < 1e-10, "unbounded optimum meets the bound to %.1e relative (< 1e-10)", eq);

  // every optimizer output: the three reference solves plus small random-grid solves
  std::vector<EnergyRun> runs = g_energy_runs;
  double worst_opt = INFINITY;
  bool ok = true;
  if (runs.empty()) {
    for (const auto& c : {ratios(0.1), ratios(0.1, 0.1)}) {
      energymin::EnergyMinProblem p;
      p.spec = s;
      p.constraints = c;
      p.t_f = 0.06;
      const auto r = energymin::minimize_energy(p);
      runs.push_back({r.report.ratio, r.report.max_violation});
    }
  }
  RatioGenerator og(kSeed + 2);
  for (int i = 0; i < 5; ++i) {
    const auto full = from_ratios(s, og.valid_acc(s));
    const double t_f = 1.1 * analytic::near_minimal_time(s, full);
    for (const auto& c : {ConstraintSet{full.delta, {}, {}}, ConstraintSet{full.delta, full.epsilon, {}}, full}) {
      energymin::EnergyMinProblem p;
      p.spec = s;
      p.constraints = c;
      p.t_f = t_f;
      p.grid = {30, 10};
      const auto r = energymin::minimize_energy(p);
      ok = ok && r.report.ratio >= 1 - lower_bound_slack(s, t_f, r.report.max_violation);
      worst_opt = std::min(worst_opt, r.report.ratio);
    }
  }
  for (const auto& r : runs) {
    ok = ok && r.ratio >= 1 - lower_bound_slack(s, 0.06, r.violation);
    worst_opt = std::min(worst_opt, r.ratio);
  }
  o.note(ok, "optimizer outputs: min ratio %.10f over %zu runs (>= 1 within the terminal-violation slack)",
         worst_opt, runs.size() + 15);
  return o;
}

Outcome sloshing() {
  Outcome o;
  const auto s = reference_spec();
  for (const auto& c : {ratios(0.1, 0.1, 0.5), ratios(0.1, 0.2, 1.0)}) {
    const auto bb = analytic::bang_bang(s, c.delta);
    const auto acc = analytic::acc_bounded(s, c.delta, *c.epsilon, *c.zeta);
    const auto poly = analytic::polynomial_ansatz(s, acc.t_f());
    const double a_bb = dynamics::sloshing_amplitude(bb);
    const double a_acc = dynamics::sloshing_amplitude(acc);
    const double a_poly = dynamics::sloshing_amplitude(poly);
    o.note(a_acc / a_bb < 1e-6 && a_poly < a_acc,
           "(%.1f, %.1f, %.1f): A(bb) = %.2e m, A(acc) = %.2e m, A(poly) = %.2e m; A(acc)/A(bb) = %.1e",
           c.delta / s.distance, *c.epsilon / (s.distance * s.omega0),
           *c.zeta / (s.distance * s.omega0 * s.omega0), a_bb, a_acc, a_poly, a_acc / a_bb);
  }
  RatioGenerator gen(kSeed);
  double worst = 0.0;
  int ordered = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto c = from_ratios(s, gen.valid_acc(s));
    const auto acc = analytic::acc_bounded(s, c.delta, *c.epsilon, *c.zeta);
    const double a_bb = dynamics::sloshing_amplitude(analytic::bang_bang(s, c.delta));
    const double a_acc = dynamics::sloshing_amplitude(acc);
    worst = std::max(worst, a_acc / a_bb);
    ordered += dynamics::sloshing_amplitude(analytic::polynomial_ansatz(s, acc.t_f())) < a_acc;
  }
  o.note(worst < 1e-6, "random draws: max A(acc)/A(bb) = %.1e over %d draws (< 1e-6)", worst, kDraws);
  o.info("random draws: A(poly) < A(acc) in " + std::to_string(ordered) + "/" + std::to_string(kDraws) +
         " (both sit at the ~1e-18 m representation floor)");
  return o;
}

Outcome energy_inequality() {
  Outcome o;
  const auto s = reference_spec();
  for (double zr : {0.8, 1.2, 1.6}) {
    int rows = 0, good = 0, skipped = 0;
    double worst = 0.0;
    for (int i = 0; i < 39; ++i) {
      const double er = 0.02 + 0.01 * i;
      const auto c = ratios(0.1, er, zr);
      std::optional<Protocol> built;
      try {
        built = analytic::acc_bounded(s, c.delta, *c.epsilon, *c.zeta);
      } catch (const Error&) {
        ++skipped;
        continue;
      }
      const Protocol& p = *built;
      const double smooth = dynamics::avg_potential_energy(p);
      const double poly = dynamics::avg_potential_energy(analytic::polynomial_ansatz(s, p.t_f()));
      ++rows;
      good += smooth < poly;
      worst = std::max(worst, smooth / poly);
    }
    o.note(rows > 0 && good == rows,
           "zeta/(d w0^2) = %.1f, epsilon/(d w0) in [0.02, 0.40]: Ep(smooth) < Ep(poly) in %d/%d rows "
           "(%d without a protocol), max Ep(smooth)/Ep(poly) = %.3f",
           zr, good, rows, skipped, worst);
  }
  return o;
}

Outcome limits() {
  Outcome o;
  const auto s = reference_spec();
  const double d = s.distance, w = s.omega0;
  double worst_vel = 0.0, worst_acc = 0.0, worst_id = 0.0;
  for (double dr : {0.02, 0.1, 0.3}) {
    const double delta = dr * d;
    const double bb = analytic::bang_bang_time(s, delta);
    for (double er : {1e6, 1e8}) {
      worst_vel = std::max(worst_vel, std::abs(analytic::vel_bounded_time(s, delta, er * d * w) / bb - 1));
    }
    for (double er : {0.02, 0.1, 0.4}) {
      const double vel = analytic::vel_bounded_time(s, delta, er * d * w);
      worst_acc = std::max(worst_acc,
                           std::abs(analytic::acc_bounded_time(s, delta, er * d * w, 1e8 * d * w * w) / vel - 1));
    }
    for (double er : {0.02, 0.1, 0.4, 1e6}) {
      const double vel = analytic::vel_bounded_time(s, delta, er * d * w);
      for (double zr : {1e-3, 0.2, 4.0, 1e8}) {
        const double eps = er * d * w, zeta = zr * d * w * w;
        const double acc = analytic::acc_bounded_time(s, delta, eps, zeta);
        worst_id = std::max(worst_id, std::abs(acc - (vel + eps / zeta)) / acc);
      }
    }
  }
  o.note(worst_vel < 1e-6, "vel t_f -> bang-bang t_f as epsilon -> inf: max relative gap %.1e", worst_vel);
  o.note(worst_acc < 1e-6, "acc t_f -> vel t_f as zeta -> inf: max relative gap %.1e", worst_acc);
  o.note(worst_id < 1e-6, "t_f(acc) = t_f(vel) + epsilon/zeta: max relative gap %.1e", worst_id);
  return o;
}

template <class T>
T rk4_max_error(int steps) {
  using std::cos;
  using boost::multiprecision::cos;
  const T w = T(2) * boost::math::constants::pi<T>() * 20, T_period = T(2) * boost::math::constants::pi<T>() / w;
  const T a0 = T(1) / 1000;
  auto f = [&](const T&, const std::array<T, 2>& x) { return std::array<T, 2>{x[1], -w * w * x[0]}; };
  const auto traj = dynamics::rk4_integrate(f, std::array<T, 2>{a0, T(0)}, T(0), T_period, steps);
  T worst = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const T t = T_period * static_cast<int>(i) / steps;
    const T e = abs(traj[i][0] - a0 * cos(w * t));
    if (e > worst) worst = e;
  }
  return worst;
}

double rk4_error_double(int steps) {
  const double w = 2 * kPi * 20, T = 2 * kPi / w, a0 = 1e-3;
  auto f = [&](double, const std::array<double, 2>& x) { return std::array<double, 2>{x[1], -w * w * x[0]}; };
  const auto traj = dynamics::rk4_integrate(f, std::array<double, 2>{a0, 0.0}, 0.0, T, steps);
  double worst = 0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    worst = std::max(worst, std::abs(traj[i][0] - a0 * std::cos(w * T * static_cast<double>(i) / steps)));
  return worst;
}

Outcome integrator_order() {
  Outcome o;
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  const int steps[] = {1000, 2000, 4000, 8000, 16000, 32000, 64000};
  std::vector<Quad> err;
  for (int n : steps) err.push_back(rk4_max_error<Quad>(n));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = static_cast<double>(err[i - 1] / err[i]);
    o.note(std::abs(ratio / 16 - 1) <= 0.2, "128-bit: h = T/%d -> T/%d: error %.3e -> %.3e, ratio %.3f", steps[i - 1],
           steps[i], static_cast<double>(err[i - 1]), static_cast<double>(err[i]), ratio);
  }
  std::string dbl = "double: ratios";
  for (std::size_t i = 1; i < 7; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %d:%.2f", steps[i], rk4_error_double(steps[i - 1]) / rk4_error_double(steps[i]));
    dbl += buf;
  }
  o.info(dbl + " (roundoff floor reached near T/1.6e4)");
  return o;
}

Outcome invariant_suites() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = run_all(kSeed, kDraws, 10);
  o.note(r.ok(), "%d checks over %d valid draws, %zu failures (%.1f s)", r.checks, kDraws, r.failures.size(),
         seconds_since(t0));
  for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 20); ++i) o.info(r.failures[i]);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
      return 2;
    }
  }
  const Criterion criteria[] = {
      {1, "minimal and near-minimal times", minimal_times},
      {2, "forward-integration oracle chain", oracle_chain},
      {3, "multiple-shooting reproduction", shooting_reproduction},
      {4, "energy-minimization ratios", energy_ratios},
      {5, "energy lower bound", lower_bound},
      {6, "sloshing suppression", sloshing},
      {7, "smooth vs polynomial energy", energy_inequality},
      {8, "limit recovery", limits},
      {9, "RK4 order of convergence", integrator_order},
      {10, "randomized invariant suites", invariant_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.note(false, "threw: %s", e.what());
    }
    std::printf("%s  criterion %2d  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title);
    for (const auto& d : o.details) std::printf("      %s\n", d.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
