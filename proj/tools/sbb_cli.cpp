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

// sbb_cli: design, verify, sweep, shoot and optimize smooth bang-bang
// transport protocols. Talks to the library only through sbb/sbb.h.
//
// Exit codes: 0 ok, 2 input error, 3 verification failure, 4 solver failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbb/sbb.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;
constexpr int kExitSolver = 4;
constexpr double kPi = 3.14159265358979323846;
constexpr const char* kOutputEnv = "SBB_OUTPUT_DIR";

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(sbb_status s) {
  switch (s) {
    case SBB_OK: return kExitOk;
    case SBB_ERR_EVALUATION:
    case SBB_ERR_SINGULAR_JACOBIAN:
    case SBB_ERR_NO_CONVERGENCE:
    case SBB_ERR_INFEASIBLE:
    case SBB_ERR_INTERNAL: return kExitSolver;
    default: return kExitInput;
  }
}

void check(sbb_status s) {
  if (s != SBB_OK) {
    throw CliError{exit_code_for(s), std::string(sbb_status_name(s)) + ": " + sbb_last_error()};
  }
}

// RAII wrappers over the C handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (ptr) Free(ptr);
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};
using Protocol = Handle<sbb_protocol, sbb_protocol_free>;
using Metrics = Handle<sbb_metrics, sbb_metrics_free>;
using Shooting = Handle<sbb_shooting_result, sbb_shooting_result_free>;
using EnergyMin = Handle<sbb_energymin_result, sbb_energymin_result_free>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() {
    if (ptr) sbb_string_free(ptr);
  }
};

// Shortest round-trip decimal, independent of the C locale.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw CliError{kExitInput, "cannot write " + path.string()};
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(num(v));
    row(cells);
  }

 private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitInput, "cannot write " + path.string()};
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::vector<double> parse_axis(const std::string& text, const std::string& what) {
  // "a,b,c" or "lo:hi:count" (inclusive, linear).
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) throw CliError{kExitInput, what + ": bad number '" + s + "'"};
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw CliError{kExitInput, what + ": expected lo:hi:count"};
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const double n = to_double(parts[2]);
    if (!(n >= 1) || n != std::floor(n)) throw CliError{kExitInput, what + ": count must be a positive integer"};
    const int count = static_cast<int>(n);
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) out.push_back(to_double(p));
  }
  if (out.empty()) throw CliError{kExitInput, what + ": empty list"};
  return out;
}

// ---------------------------------------------------------------------------
// Options shared by all subcommands, with JSON config fallback.

struct Common {
  std::string config;
  std::string particle = "rb87";
  double mass = 0.0;
  double frequency_hz = 20.0;
  double distance = 0.01;
  double delta_ratio = 0.1, epsilon_ratio = 0.0, zeta_ratio = 0.0;
  double delta = 0.0, epsilon = 0.0, zeta = 0.0;
  std::string output_dir;
  std::string name;
  bool quiet = false;
};

/// Binds long options to the config file: each entry is applied only when the
/// flag was absent from the command line.
class ConfigBinder {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + key, target, help);
    bindings_.push_back({key, opt, [&target, key](const json& v) {
                           try {
                             target = v.get<T>();
                           } catch (const json::exception&) {
                             throw CliError{kExitInput, "config key '" + key + "' has the wrong type"};
                           }
                         }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& key, bool& target, const std::string& help) {
    CLI::Option* opt = app->add_flag("--" + key, target, help);
    bindings_.push_back({key, opt, [&target, key](const json& v) {
                           if (!v.is_boolean()) throw CliError{kExitInput, "config key '" + key + "' must be boolean"};
                           target = v.get<bool>();
                         }});
    return opt;
  }

  /// Reads the JSON object at `path` and fills unset options from it.
  void apply(const std::string& path, const CLI::App* active) {
    if (path.empty()) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kExitInput, "cannot read config " + path};
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw CliError{kExitInput, "config " + path + ": " + e.what()};
    }
    if (!doc.is_object()) throw CliError{kExitInput, "config " + path + ": expected a JSON object"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      std::string key = it.key();
      std::replace(key.begin(), key.end(), '_', '-');
      bool known = false;
      for (const auto& b : bindings_) {
        if (b.key != key) continue;
        known = true;
        if (b.option->count() == 0 && owned_by(b.option, active)) {
          b.set(it.value());
          set_from_config_.push_back(key);
        }
      }
      if (!known) std::cerr << "warning: unknown config key '" << it.key() << "' ignored\n";
    }
  }

  /// True if the option was given on the command line or in the config.
  bool given(const CLI::Option* opt) const {
    if (opt->count() > 0) return true;
    for (const auto& b : bindings_) {
      if (b.option == opt) {
        for (const auto& k : set_from_config_) {
          if (k == b.key) return true;
        }
      }
    }
    return false;
  }

 private:
  static bool owned_by(const CLI::Option* opt, const CLI::App* active) {
    for (const auto* o : active->get_options()) {
      if (o == opt) return true;
    }
    return false;
  }

  struct Binding {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> set;
  };
  std::vector<Binding> bindings_;
  std::vector<std::string> set_from_config_;
};

struct CommonOptions {
  CLI::Option* mass = nullptr;
  CLI::Option* delta_ratio = nullptr;
  CLI::Option* epsilon_ratio = nullptr;
  CLI::Option* zeta_ratio = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* zeta = nullptr;
  CLI::Option* output_dir = nullptr;
};

CommonOptions add_common(CLI::App* app, Common& c, ConfigBinder& binder, const std::string& default_name) {
  CommonOptions o;
  c.name = default_name;
  app->add_option("--config", c.config, "JSON file of option/value pairs; flags override it");
  binder.add(app, "particle", c.particle, "particle preset (rb87)");
  o.mass = binder.add(app, "mass", c.mass, "particle mass in kg; overrides --particle");
  binder.add(app, "frequency", c.frequency_hz, "trap frequency in Hz (default 20)");
  binder.add(app, "distance", c.distance, "transport distance d in m (default 0.01)");
  o.delta_ratio = binder.add(app, "delta-ratio", c.delta_ratio, "bound on |u| as delta/d (default 0.1)");
  o.epsilon_ratio = binder.add(app, "epsilon-ratio", c.epsilon_ratio, "bound on |u'| as epsilon/(d w0)");
  o.zeta_ratio = binder.add(app, "zeta-ratio", c.zeta_ratio, "bound on |u''| as zeta/(d w0^2)");
  o.delta = binder.add(app, "delta", c.delta, "bound on |u| in m");
  o.epsilon = binder.add(app, "epsilon", c.epsilon, "bound on |u'| in m/s");
  o.zeta = binder.add(app, "zeta", c.zeta, "bound on |u''| in m/s^2");
  o.output_dir = binder.add(app, "output-dir", c.output_dir,
                            std::string("output directory (env ") + kOutputEnv + " overrides the config file)");
  binder.add(app, "name", c.name, "base name of the files written");
  binder.flag(app, "quiet", c.quiet, "suppress the summary on stdout");
  return o;
}

sbb_transport_spec make_spec(const Common& c, const CommonOptions& o, const ConfigBinder& b) {
  if (c.particle != "rb87") throw CliError{kExitInput, "particle: unknown preset '" + c.particle + "'"};
  sbb_transport_spec spec = sbb_default_spec(2.0 * kPi * c.frequency_hz, c.distance);
  if (b.given(o.mass)) spec.mass = c.mass;
  return spec;
}

/// Ratio inputs win over SI inputs when both are present.
sbb_constraints make_constraints(const sbb_transport_spec& spec, const Common& c,
                                 const CommonOptions& o, const ConfigBinder& b) {
  const double d = spec.distance, w = spec.omega0;
  auto pick = [&](const char* what, CLI::Option* ratio, CLI::Option* si, double ratio_value,
                  double si_value, double scale) -> std::optional<double> {
    const bool has_ratio = b.given(ratio), has_si = b.given(si);
    if (has_ratio && has_si) {
      std::cerr << "warning: both " << what << " and " << what
                << "-ratio given; using the ratio\n";
    }
    if (has_ratio) return ratio_value * scale;
    if (has_si) return si_value;
    return std::nullopt;
  };
  sbb_constraints out{};
  out.delta = pick("delta", o.delta_ratio, o.delta, c.delta_ratio, c.delta, d).value_or(c.delta_ratio * d);
  if (auto e = pick("epsilon", o.epsilon_ratio, o.epsilon, c.epsilon_ratio, c.epsilon, d * w)) {
    out.has_epsilon = 1;
    out.epsilon = *e;
  }
  if (auto z = pick("zeta", o.zeta_ratio, o.zeta, c.zeta_ratio, c.zeta, d * w * w)) {
    out.has_zeta = 1;
    out.zeta = *z;
  }
  return out;
}

fs::path output_dir(const Common& c, const CommonOptions& o) {
  std::string dir = ".";
  if (!c.output_dir.empty()) dir = c.output_dir;  // config file or flag
  if (const char* env = std::getenv(kOutputEnv); env && *env && o.output_dir->count() == 0) dir = env;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitInput, "cannot create output directory " + dir + ": " + ec.message()};
  return dir;
}

std::string protocol_json(const sbb_protocol* p) {
  OwnedString s;
  check(sbb_protocol_to_json(p, &s.ptr));
  return s.ptr;
}

void write_trajectory(const fs::path& path, const sbb_protocol* p, int samples) {
  CsvWriter csv(path);
  csv.row(std::vector<std::string>{"t", "u", "qc", "q0", "qc_dot"});
  const double t_f = sbb_protocol_t_f(p);
  for (int i = 0; i < samples; ++i) {
    const double t = (i == samples - 1) ? t_f : t_f * i / (samples - 1);
    sbb_sample s{};
    check(sbb_protocol_eval(p, t, &s));
    csv.row(std::vector<double>{t, s.u, s.qc, s.q0, s.qc_dot});
  }
}

std::vector<double> switch_times(const sbb_protocol* p) {
  std::size_t n = 0;
  check(sbb_protocol_switch_times(p, nullptr, 0, &n));
  std::vector<double> t(n);
  check(sbb_protocol_switch_times(p, t.data(), n, &n));
  return t;
}

std::string ms_list(const std::vector<double>& seconds) {
  std::string out;
  for (std::size_t i = 0; i < seconds.size(); ++i) {
    if (i) out += ", ";
    out += fixed(seconds[i] * 1e3, 4);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct DesignArgs {
  std::string kind = "auto";
  double t_f_ms = 0.0;
  int samples = 1001;
};

int run_design(const Common& c, const CommonOptions& o, const ConfigBinder& b, const DesignArgs& a) {
  if (a.samples < 2) throw CliError{kExitInput, "samples: must be >= 2"};
  const auto spec = make_spec(c, o, b);
  auto cons = make_constraints(spec, c, o, b);
  Protocol p;
  if (a.kind == "polynomial") {
    double t_f = a.t_f_ms * 1e-3;
    if (!(a.t_f_ms > 0.0)) check(sbb_near_minimal_time(&spec, &cons, &t_f));
    check(sbb_design_polynomial_ansatz(&spec, t_f, p.out()));
  } else {
    if (a.kind == "bang-bang") {
      cons.has_epsilon = cons.has_zeta = 0;
    } else if (a.kind == "vel-bounded") {
      if (!cons.has_epsilon) throw CliError{kExitInput, "epsilon: required for vel-bounded"};
      cons.has_zeta = 0;
    } else if (a.kind == "acc-bounded") {
      if (!cons.has_epsilon || !cons.has_zeta) {
        throw CliError{kExitInput, "epsilon, zeta: both required for acc-bounded"};
      }
    } else if (a.kind != "auto") {
      throw CliError{kExitInput, "kind: expected auto, bang-bang, vel-bounded, acc-bounded or polynomial"};
    }
    check(sbb_design(&spec, &cons, p.out()));
  }
  const auto dir = output_dir(c, o);
  write_text(dir / (c.name + ".json"), protocol_json(p.get()));
  write_trajectory(dir / (c.name + ".csv"), p.get(), a.samples);
  if (!c.quiet) {
    std::cout << "t_f = " << fixed(sbb_protocol_t_f(p.get()) * 1e3, 2) << " ms\n";
    const auto st = switch_times(p.get());
    std::cout << "switching times (" << st.size() << ") = [" << ms_list(st) << "] ms\n";
    if (const char* w = sbb_protocol_warning(p.get())) std::cout << "warning: regime " << w << "\n";
    std::cout << "wrote " << (dir / (c.name + ".json")).string() << " and "
              << (dir / (c.name + ".csv")).string() << "\n";
  }
  if (const char* w = sbb_protocol_warning(p.get())) {
    std::cerr << "warning: " << w << " regime; switching times are not ordered\n";
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string protocol;
  std::string output;
  int steps = 10000;
  int mode = 0;
};

int run_verify(const Common& c, const CommonOptions& o, const VerifyArgs& a) {
  std::ifstream in(a.protocol, std::ios::binary);
  if (!in) throw CliError{kExitInput, "cannot read " + a.protocol};
  std::stringstream buf;
  buf << in.rdbuf();
  Protocol p;
  check(sbb_protocol_from_json(buf.str().c_str(), p.out()));
  Metrics m;
  check(sbb_verify(p.get(), a.steps, a.mode, m.out()));
  OwnedString text;
  check(sbb_metrics_to_json(m.get(), &text.ptr));
  fs::path out = a.output;
  if (out.empty()) out = output_dir(c, o) / (fs::path(a.protocol).stem().string() + ".metrics.json");
  write_text(out, text.ptr);
  const bool passed = sbb_metrics_passed(m.get()) != 0;
  if (!c.quiet) {
    std::cout << "avg potential energy = " << num(sbb_metrics_avg_potential_energy(m.get())) << " J\n";
    std::cout << "sloshing amplitude = " << num(sbb_metrics_sloshing_amplitude(m.get())) << " m\n";
    std::cout << "final excess energy = " << num(sbb_metrics_final_excess_energy(m.get())) << " J\n";
    std::cout << (passed ? "PASS" : "FAIL") << " boundary residuals; wrote " << out.string() << "\n";
  }
  return passed ? kExitOk : kExitVerify;
}

struct SweepArgs {
  std::string mode = "tf";
  std::string epsilon_ratios = "0.02:0.4:20";
  std::string zeta_ratios = "0.5,1,2";
  std::string output;
};

int run_sweep(const Common& c, const CommonOptions& o, const ConfigBinder& b, const SweepArgs& a) {
  const auto spec = make_spec(c, o, b);
  const auto base = make_constraints(spec, c, o, b);
  const auto eps = parse_axis(a.epsilon_ratios, "epsilon-ratios");
  std::vector<std::optional<double>> zetas;
  if (a.zeta_ratios == "none") {
    zetas.push_back(std::nullopt);
  } else {
    for (double z : parse_axis(a.zeta_ratios, "zeta-ratios")) zetas.push_back(z);
  }
  const double d = spec.distance, w = spec.omega0;
  fs::path out = a.output;
  if (out.empty()) out = output_dir(c, o) / (c.name + ".csv");
  CsvWriter csv(out);
  int rows = 0;
  if (a.mode == "tf") {
    csv.row(std::vector<std::string>{"epsilon_ratio", "zeta_ratio", "t_f_ms", "regime_valid"});
    for (const auto& z : zetas) {
      for (double e : eps) {
        sbb_constraints k = base;
        k.has_epsilon = 1;
        k.epsilon = e * d * w;
        k.has_zeta = z.has_value();
        k.zeta = z.value_or(0.0) * d * w * w;
        double t_f = 0.0;
        check(sbb_near_minimal_time(&spec, &k, &t_f));
        const int valid = z ? sbb_acc_bounded_regime_valid(&spec, &k) : 1;
        csv.row(std::vector<std::string>{num(e), z ? num(*z) : "none", num(t_f * 1e3), valid ? "1" : "0"});
        ++rows;
      }
    }
  } else if (a.mode == "energy") {
    csv.row(std::vector<std::string>{"epsilon_ratio", "zeta_ratio", "t_f_ms", "ep_smooth_J",
                                     "ep_polynomial_J", "slosh_smooth_m", "slosh_polynomial_m",
                                     "regime_valid"});
    for (const auto& z : zetas) {
      for (double e : eps) {
        sbb_constraints k = base;
        k.has_epsilon = 1;
        k.epsilon = e * d * w;
        k.has_zeta = z.has_value();
        k.zeta = z.value_or(0.0) * d * w * w;
        Protocol smooth, poly;
        check(sbb_design(&spec, &k, smooth.out()));
        const double t_f = sbb_protocol_t_f(smooth.get());
        check(sbb_design_polynomial_ansatz(&spec, t_f, poly.out()));
        double es = 0, ep = 0, as = 0, ap = 0;
        check(sbb_avg_potential_energy(smooth.get(), &es));
        check(sbb_avg_potential_energy(poly.get(), &ep));
        check(sbb_sloshing_amplitude(smooth.get(), 1 << 16, &as));
        check(sbb_sloshing_amplitude(poly.get(), 1 << 16, &ap));
        const int valid = sbb_protocol_warning(smooth.get()) == nullptr;
        csv.row(std::vector<std::string>{num(e), z ? num(*z) : "none", num(t_f * 1e3), num(es),
                                         num(ep), num(as), num(ap), valid ? "1" : "0"});
        ++rows;
      }
    }
  } else {
    throw CliError{kExitInput, "mode: expected tf or energy"};
  }
  if (!c.quiet) std::cout << "wrote " << rows << " rows to " << out.string() << "\n";
  return kExitOk;
}

struct ShootArgs {
  std::string guess_ms;
  double rho = 0.0, tol = 0.0, fd_step = 0.0;
  int max_iter = 0;
};

int run_shoot(const Common& c, const CommonOptions& o, const ConfigBinder& b, const ShootArgs& a,
              const CLI::App* app) {
  const auto spec = make_spec(c, o, b);
  const auto cons = make_constraints(spec, c, o, b);
  if (!cons.has_epsilon || !cons.has_zeta) {
    throw CliError{kExitInput, "epsilon, zeta: shooting needs all three bounds"};
  }
  auto opts = sbb_shooting_default_options();
  if (b.given(app->get_option("--rho"))) opts.rho = a.rho;
  if (b.given(app->get_option("--tol"))) opts.tol = a.tol;
  if (b.given(app->get_option("--max-iter"))) opts.max_iter = a.max_iter;
  if (b.given(app->get_option("--fd-step"))) opts.fd_step = a.fd_step;
  std::vector<double> guess;
  if (!a.guess_ms.empty()) {
    guess = parse_axis(a.guess_ms, "guess-ms");
    if (guess.size() != SBB_SHOOTING_UNKNOWNS) {
      throw CliError{kExitInput, "guess-ms: expected 11 values (t1..t10, t_f)"};
    }
    for (double& g : guess) g *= 1e-3;
  }
  Shooting r;
  check(sbb_shoot(&spec, &cons, guess.empty() ? nullptr : guess.data(), &opts, r.out()));
  const auto dir = output_dir(c, o);
  {
    CsvWriter csv(dir / (c.name + "_history.csv"));
    std::vector<std::string> head{"epoch", "residual_norm"};
    for (int i = 1; i <= 10; ++i) head.push_back("t" + std::to_string(i));
    head.push_back("t_f");
    csv.row(head);
    for (std::size_t i = 0; i < sbb_shooting_history_size(r.get()); ++i) {
      int it = 0;
      double norm = 0.0;
      double g[SBB_SHOOTING_UNKNOWNS];
      check(sbb_shooting_history_entry(r.get(), i, &it, &norm, g));
      std::vector<std::string> cells{std::to_string(it), num(norm)};
      for (double v : g) cells.push_back(num(v));
      csv.row(cells);
    }
  }
  Protocol p;
  check(sbb_shooting_protocol(r.get(), p.out()));
  write_text(dir / (c.name + ".json"), protocol_json(p.get()));
  if (!c.quiet) {
    double g[SBB_SHOOTING_UNKNOWNS];
    sbb_shooting_solution(r.get(), g);
    std::cout << "converged after " << sbb_shooting_iterations(r.get())
              << " iterations, |f| = " << num(sbb_shooting_residual_norm(r.get())) << "\n";
    std::cout << "switching times = [" << ms_list(std::vector<double>(g, g + 10)) << "] ms\n";
    std::cout << "t_f = " << fixed(g[10] * 1e3, 2) << " ms\n";
  }
  return kExitOk;
}

struct OptimizeArgs {
  double t_f_ms = 0.0;
  int nodes = 0, substeps = 0, max_outer = 0;
};

int run_optimize(const Common& c, const CommonOptions& o, const ConfigBinder& b, const OptimizeArgs& a,
                 const CLI::App* app) {
  const auto spec = make_spec(c, o, b);
  const auto cons = make_constraints(spec, c, o, b);
  if (!b.given(app->get_option("--t-f-ms"))) throw CliError{kExitInput, "t-f-ms: required"};
  auto opts = sbb_energymin_default_options();
  if (b.given(app->get_option("--nodes"))) opts.nodes = a.nodes;
  if (b.given(app->get_option("--substeps"))) opts.substeps = a.substeps;
  if (b.given(app->get_option("--max-outer"))) opts.max_outer = a.max_outer;
  EnergyMin r;
  check(sbb_minimize_energy(&spec, &cons, a.t_f_ms * 1e-3, &opts, nullptr, r.out()));
  const auto dir = output_dir(c, o);
  std::vector<double> nodes(sbb_energymin_nodes(r.get(), nullptr, 0));
  sbb_energymin_nodes(r.get(), nodes.data(), nodes.size());
  {
    CsvWriter csv(dir / (c.name + "_controller.csv"));
    csv.row(std::vector<std::string>{"t", "u"});
    const double t_f = a.t_f_ms * 1e-3;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double t = (i + 1 == nodes.size()) ? t_f : t_f * static_cast<double>(i) / (nodes.size() - 1);
      csv.row(std::vector<double>{t, nodes[i]});
    }
  }
  Protocol p;
  check(sbb_energymin_protocol(r.get(), p.out()));
  write_text(dir / (c.name + ".json"), protocol_json(p.get()));
  if (!c.quiet) {
    std::cout << "ratio = " << fixed(sbb_energymin_ratio(r.get()), 4) << "\n";
    std::cout << "avg potential energy = " << num(sbb_energymin_avg_potential_energy(r.get()))
              << " J (lower bound " << num(sbb_energymin_lower_bound(r.get())) << " J)\n";
    std::cout << "max violation = " << num(sbb_energymin_max_violation(r.get())) << ", outer iterations = "
              << sbb_energymin_outer_iterations(r.get()) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth bang-bang transport protocols"};
  app.require_subcommand(1);
  ConfigBinder binder;

  Common design_c, verify_c, sweep_c, shoot_c, optimize_c;

  auto* design = app.add_subcommand("design", "generate an analytic protocol");
  auto design_o = add_common(design, design_c, binder, "protocol");
  DesignArgs design_a;
  binder.add(design, "kind", design_a.kind, "auto, bang-bang, vel-bounded, acc-bounded or polynomial");
  binder.add(design, "t-f-ms", design_a.t_f_ms, "duration for the polynomial kind (default: near-minimal)");
  binder.add(design, "samples", design_a.samples, "rows in the trajectory CSV (default 1001)");

  auto* verify = app.add_subcommand("verify", "integrate a protocol file and report metrics");
  auto verify_o = add_common(verify, verify_c, binder, "metrics");
  VerifyArgs verify_a;
  verify->add_option("protocol", verify_a.protocol, "protocol JSON file")->required();
  binder.add(verify, "output", verify_a.output, "metrics JSON path");
  binder.add(verify, "steps", verify_a.steps, "RK4 steps (default 10000)");
  binder.add(verify, "mode", verify_a.mode, "trap mode index n for energies (default 0)");

  auto* sweep = app.add_subcommand("sweep", "tabulate near-minimal times or energies");
  auto sweep_o = add_common(sweep, sweep_c, binder, "sweep");
  SweepArgs sweep_a;
  binder.add(sweep, "mode", sweep_a.mode, "tf (near-minimal times) or energy");
  binder.add(sweep, "epsilon-ratios", sweep_a.epsilon_ratios, "list a,b,c or range lo:hi:count");
  binder.add(sweep, "zeta-ratios", sweep_a.zeta_ratios, "list, range, or none for velocity-bounded");
  binder.add(sweep, "output", sweep_a.output, "CSV path");

  auto* shoot = app.add_subcommand("shoot", "solve the switching times by multiple shooting");
  auto shoot_o = add_common(shoot, shoot_c, binder, "shooting");
  ShootArgs shoot_a;
  binder.add(shoot, "guess-ms", shoot_a.guess_ms, "11 comma-separated times t1..t10,t_f in ms");
  binder.add(shoot, "rho", shoot_a.rho, "update rate in (0, 1] (default 0.5)");
  binder.add(shoot, "tol", shoot_a.tol, "dimensionless residual tolerance (default 1e-4)");
  binder.add(shoot, "max-iter", shoot_a.max_iter, "iteration limit (default 200)");
  binder.add(shoot, "fd-step", shoot_a.fd_step, "Jacobian difference step in s (default 1e-7)");

  auto* optimize = app.add_subcommand("optimize", "minimize the average potential energy at fixed t_f");
  auto optimize_o = add_common(optimize, optimize_c, binder, "optimized");
  OptimizeArgs optimize_a;
  binder.add(optimize, "t-f-ms", optimize_a.t_f_ms, "duration in ms");
  binder.add(optimize, "nodes", optimize_a.nodes, "controller nodes N (default 100)");
  binder.add(optimize, "substeps", optimize_a.substeps, "RK4 substeps M per interval (default 10)");
  binder.add(optimize, "max-outer", optimize_a.max_outer, "augmented Lagrangian iterations (default 60)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (design->parsed()) {
      binder.apply(design_c.config, design);
      return run_design(design_c, design_o, binder, design_a);
    }
    if (verify->parsed()) {
      binder.apply(verify_c.config, verify);
      return run_verify(verify_c, verify_o, verify_a);
    }
    if (sweep->parsed()) {
      binder.apply(sweep_c.config, sweep);
      return run_sweep(sweep_c, sweep_o, binder, sweep_a);
    }
    if (shoot->parsed()) {
      binder.apply(shoot_c.config, shoot);
      return run_shoot(shoot_c, shoot_o, binder, shoot_a, shoot);
    }
    if (optimize->parsed()) {
      binder.apply(optimize_c.config, optimize);
      return run_optimize(optimize_c, optimize_o, binder, optimize_a, optimize);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitInput;
}
