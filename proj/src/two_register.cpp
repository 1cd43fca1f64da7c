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


#include "kdistinct/two_register.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace kdistinct {

namespace {

std::vector<int> elements_of(std::uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return out;
}

}  // namespace

TwoRegisterSimulator::TwoRegisterSimulator(const ProblemParams& params,
                                           const KDistinctnessInstance& instance,
                                           std::uint64_t cap)
    : params_(params), instance_(&instance), table_(params.n, params.r, cap) {
  if (instance.values.size() != static_cast<std::size_t>(params.n)) {
    throw std::invalid_argument("instance length differs from N");
  }
  for (long long v : instance.values) {
    if (v < 1 || v > params.m) {
      throw std::invalid_argument("inconsistent M: list value " + std::to_string(v) +
                                  " outside [1, " + std::to_string(params.m) + "]");
    }
  }
  alphabet_ = std::bit_ceil(static_cast<std::size_t>(params.m) + 1);
  codes_ = 1;
  for (int i = 0; i <= params.r; ++i) {
    if (codes_ > cap / alphabet_) throw CapExceeded("second register exceeds cap");
    codes_ *= alphabet_;
  }
  if (table_.size() > cap / codes_) {
    throw CapExceeded("two-register dimension exceeds cap " + std::to_string(cap));
  }

  const int r = params.r;
  const std::size_t free = static_cast<std::size_t>(params.n - r);
  const auto& x = instance.values;
  std::vector<std::size_t> polygon;

  // U_alpha acts on the first register: group by (S, second register).
  for (std::size_t s = 0; s < table_.subset_count(); ++s) {
    for (std::size_t code = 0; code < codes_; ++code) {
      polygon.clear();
      for (std::size_t p = 0; p < free; ++p) polygon.push_back(joint_index(s * free + p, code));
      alpha_ext_.add_polygon(polygon);
    }
  }

  // Extended beta polygons, one per (T, f).
  std::vector<std::size_t> f(static_cast<std::size_t>(r + 1));
  std::vector<std::size_t> slots(static_cast<std::size_t>(r + 1));
  for (std::uint64_t rank = 0; rank < binomial(params.n, r + 1); ++rank) {
    const auto joined = subset_unrank(rank, params.n, r + 1);
    for (std::size_t fcode = 0; fcode < codes_; ++fcode) {
      f = decode(fcode);
      polygon.clear();
      for (std::size_t out = 0; out < joined.size(); ++out) {
        Vertex v;
        v.y = joined[out];
        std::size_t slot = 0;
        for (std::size_t i = 0; i < joined.size(); ++i) {
          if (i == out) continue;
          v.subset.push_back(joined[i]);
          slots[slot++] = f[i];
        }
        slots[slot] = f[out];
        polygon.push_back(joint_index(table_.index_of(v), encode(slots)));
      }
      beta_ext_.add_polygon(polygon);
    }
  }

  oracle_target_.resize(dimension());
  setup_target_.resize(dimension());
  marked_ = marked_vertices(table_, instance, params.k);
  for (std::size_t v = 0; v < table_.size(); ++v) {
    const auto subset = elements_of(table_.subset_mask(v));
    const auto xy = static_cast<std::size_t>(x[static_cast<std::size_t>(table_.y(v) - 1)]);
    for (std::size_t code = 0; code < codes_; ++code) {
      auto s = decode(code);
      s[static_cast<std::size_t>(r)] ^= xy;
      oracle_target_[joint_index(v, code)] = joint_index(v, encode(s));
      s[static_cast<std::size_t>(r)] ^= xy;
      for (std::size_t m = 0; m < subset.size(); ++m) {
        s[m] ^= static_cast<std::size_t>(x[static_cast<std::size_t>(subset[m] - 1)]);
      }
      setup_target_[joint_index(v, code)] = joint_index(v, encode(s));
    }
  }
}

std::size_t TwoRegisterSimulator::encode(std::span<const std::size_t> slots) const {
  std::size_t code = 0;
  for (std::size_t s : slots) code = code * alphabet_ + s;
  return code;
}

std::vector<std::size_t> TwoRegisterSimulator::decode(std::size_t code) const {
  std::vector<std::size_t> slots(static_cast<std::size_t>(params_.r + 1));
  for (std::size_t i = slots.size(); i-- > 0;) {
    slots[i] = code % alphabet_;
    code /= alphabet_;
  }
  return slots;
}

std::vector<std::complex<double>> TwoRegisterSimulator::blank_state() const {
  std::vector<std::complex<double>> state(dimension(), {0, 0});
  const double amp = 1.0 / std::sqrt(static_cast<double>(table_.size()));
  for (std::size_t v = 0; v < table_.size(); ++v) state[joint_index(v, 0)] = amp;
  return state;
}

void TwoRegisterSimulator::permute(std::vector<std::complex<double>>& state,
                                   const std::vector<std::size_t>& target) const {
  std::vector<std::complex<double>> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out[target[i]] = state[i];
  state.swap(out);
}

void TwoRegisterSimulator::apply_setup_query(std::vector<std::complex<double>>& state) const {
  permute(state, setup_target_);
}

void TwoRegisterSimulator::apply_oracle(std::vector<std::complex<double>>& state) const {
  permute(state, oracle_target_);
}

void TwoRegisterSimulator::apply_alpha(std::vector<std::complex<double>>& state) const {
  reflect_in_place(state, alpha_ext_);
}

void TwoRegisterSimulator::apply_beta_ext(std::vector<std::complex<double>>& state) const {
  reflect_in_place(state, beta_ext_);
}

void TwoRegisterSimulator::apply_phase_flip(std::vector<std::complex<double>>& state) const {
  for (std::size_t v = 0; v < table_.size(); ++v) {
    if (!marked_[v]) continue;
    for (std::size_t code = 0; code < codes_; ++code) {
      auto& a = state[joint_index(v, code)];
      a = -a;
    }
  }
}

std::size_t TwoRegisterSimulator::correspondence_violations(
    const std::vector<std::complex<double>>& state, bool last_slot_holds_y,
    double threshold) const {
  const auto& x = instance_->values;
  std::size_t violations = 0;
  for (std::size_t v = 0; v < table_.size(); ++v) {
    const auto subset = elements_of(table_.subset_mask(v));
    const auto xy = static_cast<std::size_t>(x[static_cast<std::size_t>(table_.y(v) - 1)]);
    for (std::size_t code = 0; code < codes_; ++code) {
      if (std::abs(state[joint_index(v, code)]) <= threshold) continue;
      const auto s = decode(code);
      bool ok = s.back() == (last_slot_holds_y ? xy : 0);
      for (std::size_t m = 0; ok && m < subset.size(); ++m) {
        ok = s[m] == static_cast<std::size_t>(x[static_cast<std::size_t>(subset[m] - 1)]);
      }
      if (!ok) ++violations;
    }
  }
  return violations;
}

std::vector<double> TwoRegisterSimulator::first_register_marginal(
    const std::vector<std::complex<double>>& state) const {
  std::vector<double> marginal(table_.size(), 0.0);
  for (std::size_t v = 0; v < table_.size(); ++v) {
    for (std::size_t code = 0; code < codes_; ++code) {
      marginal[v] += std::norm(state[joint_index(v, code)]);
    }
  }
  return marginal;
}

TwoRegisterResult run_two_register_microsim(const ProblemParams& params,
                                            const KDistinctnessInstance& instance, int t1,
                                            int t2, std::uint64_t cap) {
  if (t1 < 0 || t2 < 0) throw std::invalid_argument("step counts must be nonnegative");
  instance.require_unique_collision();
  const TwoRegisterSimulator sim(params, instance, cap);

  TwoRegisterResult result;
  auto& state = result.state;
  state = sim.blank_state();
  sim.apply_setup_query(state);
  result.setup_queries = static_cast<std::size_t>(params.r);
  result.setup_violations = sim.correspondence_violations(state, false);

  for (int outer = 0; outer < t1; ++outer) {
    sim.apply_phase_flip(state);
    for (int inner = 0; inner < t2; ++inner) {
      sim.apply_alpha(state);
      sim.apply_oracle(state);
      result.oracle_violations += sim.correspondence_violations(state, true);
      sim.apply_beta_ext(state);
      result.beta_violations += sim.correspondence_violations(state, true);
      sim.apply_oracle(state);
      result.restore_violations += sim.correspondence_violations(state, false);
      result.oracle_queries += 2;
    }
  }
  result.marginal = sim.first_register_marginal(state);
  const auto marked = marked_vertices(sim.table(), instance, params.k);
  for (std::size_t v = 0; v < marked.size(); ++v) {
    if (marked[v]) result.marked_probability += result.marginal[v];
  }
  return result;
}

}  // namespace kdistinct
