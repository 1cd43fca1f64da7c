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


#include "kdistinct/state_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace kdistinct {

namespace {

constexpr std::array<char, 4> kMagic{'K', 'D', 'W', 'S'};

static_assert(std::endian::native == std::endian::little,
              "binary state dumps assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated state dump");
  return value;
}

}  // namespace

void write_state_binary(std::ostream& out, const StateDump& dump) {
  out.write(kMagic.data(), kMagic.size());
  put<std::int32_t>(out, dump.version);
  put<std::int32_t>(out, dump.n);
  put<std::int32_t>(out, dump.k);
  put<std::int32_t>(out, dump.r);
  put<std::uint64_t>(out, dump.state.size());
  for (const auto& a : dump.state.amplitudes) {
    put<double>(out, a.real());
    put<double>(out, a.imag());
  }
}

StateDump read_state_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("not a kdistinct state dump");
  StateDump dump;
  dump.version = get<std::int32_t>(in);
  if (dump.version != kStateFormatVersion) {
    throw std::runtime_error("unsupported state dump version " + std::to_string(dump.version));
  }
  dump.n = get<std::int32_t>(in);
  dump.k = get<std::int32_t>(in);
  dump.r = get<std::int32_t>(in);
  const auto count = get<std::uint64_t>(in);
  dump.state.amplitudes.resize(count);
  for (auto& a : dump.state.amplitudes) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    a = {re, im};
  }
  return dump;
}

std::string state_to_json(const StateDump& dump) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : dump.state.amplitudes) amps.push_back({a.real(), a.imag()});
  nlohmann::json doc{{"format", "kdistinct-state"}, {"version", dump.version},
                     {"N", dump.n},                 {"k", dump.k},
                     {"r", dump.r},                 {"amplitudes", std::move(amps)}};
  return doc.dump();
}

StateDump state_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (doc.value("format", "") != "kdistinct-state") {
    throw std::runtime_error("not a kdistinct state document");
  }
  StateDump dump;
  dump.version = doc.at("version").get<int>();
  if (dump.version != kStateFormatVersion) {
    throw std::runtime_error("unsupported state dump version " + std::to_string(dump.version));
  }
  dump.n = doc.at("N").get<int>();
  dump.k = doc.at("k").get<int>();
  dump.r = doc.at("r").get<int>();
  for (const auto& pair : doc.at("amplitudes")) {
    dump.state.amplitudes.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  return dump;
}

}  // namespace kdistinct
