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

#include "sbb/protocol_io.hpp"

#include <json.hpp>

#include "sbb/errors.hpp"

namespace sbb::io {

using nlohmann::json;

namespace {

json segments_to_json(const std::vector<PiecewiseSegment>& segs) {
  json arr = json::array();
  for (const auto& s : segs) arr.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}, {"coeffs", s.coeffs}});
  return arr;
}

std::vector<PiecewiseSegment> segments_from_json(const json& arr, double t_f) {
  std::vector<PiecewiseSegment> out;
  for (const auto& j : arr) {
    PiecewiseSegment s{j.at("t_start").get<double>(), j.at("t_end").get<double>(),
                       j.at("coeffs").get<std::vector<double>>()};
    if (s.t_start >= t_f) break;
    if (s.t_end > t_f) s.t_end = t_f;
    out.push_back(std::move(s));
  }
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string protocol_to_json(const Protocol& p) {
  const auto& s = p.spec();
  const auto& c = p.constraints();
  json doc = {
      {"version", kProtocolFormatVersion},
      {"kind", std::string(to_string(p.kind()))},
      {"spec", {{"mass", s.mass}, {"omega0", s.omega0}, {"distance", s.distance}, {"hbar", s.hbar}}},
      {"constraints",
       {{"delta", c.delta}, {"epsilon", optional_number(c.epsilon)}, {"zeta", optional_number(c.zeta)}}},
      {"t_f", p.t_f()},
      {"switch_times", p.switch_times()},
      {"regime_warning", p.regime_warning() ? json(*p.regime_warning()) : json(nullptr)},
      {"u_segments", segments_to_json(p.u_segments())},
      {"qc_segments", segments_to_json(p.qc_segments())},
  };
  return doc.dump(2);
}

Protocol protocol_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("protocol JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kProtocolFormatVersion) {
      throw ParseError("unsupported protocol format version");
    }
    const auto kind = protocol_kind_from_string(doc.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown protocol kind");
    TransportSpec spec;
    const auto& js = doc.at("spec");
    spec.mass = js.at("mass").get<double>();
    spec.omega0 = js.at("omega0").get<double>();
    spec.distance = js.at("distance").get<double>();
    spec.hbar = js.at("hbar").get<double>();
    ConstraintSet c;
    const auto& jc = doc.at("constraints");
    c.delta = jc.at("delta").get<double>();
    c.epsilon = optional_from(jc, "epsilon");
    c.zeta = optional_from(jc, "zeta");
    const double t_f = doc.at("t_f").get<double>();
    std::vector<double> switches;
    for (double t : doc.at("switch_times").get<std::vector<double>>()) {
      if (t < t_f) switches.push_back(t);
    }
    std::optional<std::string> warning;
    if (doc.contains("regime_warning") && !doc.at("regime_warning").is_null()) {
      warning = doc.at("regime_warning").get<std::string>();
    }
    return Protocol(spec, c, *kind, t_f, std::move(switches),
                    segments_from_json(doc.at("u_segments"), t_f),
                    segments_from_json(doc.at("qc_segments"), t_f), std::move(warning));
  } catch (const json::exception& e) {
    throw ParseError(std::string("protocol JSON: ") + e.what());
  }
}

std::string metrics_to_json(const dynamics::MetricsReport& r) {
  json residuals = json::array();
  for (const auto& b : r.boundary_residuals) {
    residuals.push_back({{"name", b.name},
                         {"value", b.value},
                         {"tolerance", b.tolerance},
                         {"required", b.required},
                         {"passed", b.passed()}});
  }
  json trace = json::array();
  for (const auto& e : r.energy_trace) trace.push_back({e.t, e.energy});
  json doc = {
      {"version", kProtocolFormatVersion},
      {"passed", r.passed()},
      {"mode", r.mode},
      {"avg_potential_energy", r.avg_potential_energy},
      {"sloshing_amplitude", r.sloshing_amplitude},
      {"final_excess_energy", r.final_excess_energy},
      {"final_position", r.final_position},
      {"final_velocity", r.final_velocity},
      {"boundary_residuals", residuals},
      {"energy_trace", trace},
  };
  return doc.dump(2);
}

}  // namespace sbb::io
