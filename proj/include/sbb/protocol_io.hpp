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

#include <string>
#include <string_view>

#include "sbb/core.hpp"
#include "sbb/dynamics.hpp"

// Versioned JSON documents for protocols and verification reports. Numbers
// are written with round-trip precision, so a saved protocol reloads to the
// same coefficients bit for bit.

namespace sbb::io {

inline constexpr int kProtocolFormatVersion = 1;

std::string protocol_to_json(const Protocol& p);

/// Segments extending past the declared t_f are cut at t_f, and switch times
/// at or beyond t_f are dropped. Throws ParseError on malformed documents and
/// DomainError when the content violates a Protocol invariant.
Protocol protocol_from_json(std::string_view text);

std::string metrics_to_json(const dynamics::MetricsReport& report);

}  // namespace sbb::io
