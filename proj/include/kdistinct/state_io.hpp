// Copyright 2026 The kdistinct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <iosfwd>
#include <string>

#include "kdistinct/combinatorics.hpp"
#include "kdistinct/full_walk.hpp"

namespace kdistinct {

inline constexpr int kStateFormatVersion = 1;

/// Full-state dump: header (N, k, r, format version) followed by the
/// amplitudes in canonical vertex order.
struct StateDump {
  int n = 0;
  int k = 0;
  int r = 0;
  int version = kStateFormatVersion;
  FullState state;
};

// Binary layout, little-endian: magic "KDWS", int32 version, int32 N, int32 k,
// int32 r, uint64 count, then count pairs of float64 (real, imag).
void write_state_binary(std::ostream& out, const StateDump& dump);
StateDump read_state_binary(std::istream& in);

// JSON: {"format":"kdistinct-state","version":1,"N":..,"k":..,"r":..,
//        "amplitudes":[[re,im],...]}
std::string state_to_json(const StateDump& dump);
StateDump state_from_json(const std::string& text);

}  // namespace kdistinct
