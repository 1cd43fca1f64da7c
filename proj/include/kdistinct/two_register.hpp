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

#include <complex>
#include <cstdint>
#include <vector>

#include "kdistinct/combinatorics.hpp"
#include "kdistinct/full_walk.hpp"

namespace kdistinct {

/// Basis |S,y>|x'_1..x'_{r+1}> with slot symbols in {0} u [M], encoded on
/// ceil(log2(M+1)) bits so that the oracle's XOR is bitwise.
///
/// The extended beta reflection groups basis states by (T, f) where
/// T = S u {y} and f assigns a symbol to every element of T. Inside a group the
/// vertex (T \ {y'}, y') carries f on slots 1..r in ascending index order and
/// f(y') on slot r+1.
class TwoRegisterSimulator {
 public:
  TwoRegisterSimulator(const ProblemParams& params, const KDistinctnessInstance& instance,
                       std::uint64_t cap = kDefaultStateCap);

  [[nodiscard]] std::size_t dimension() const noexcept { return table_.size() * codes_; }
  [[nodiscard]] std::size_t alphabet_size() const noexcept { return alphabet_; }
  [[nodiscard]] const VertexTable& table() const noexcept { return table_; }

  [[nodiscard]] std::size_t encode(std::span<const std::size_t> slots) const;
  [[nodiscard]] std::vector<std::size_t> decode(std::size_t code) const;
  [[nodiscard]] std::size_t joint_index(std::size_t vertex, std::size_t code) const {
    return vertex * codes_ + code;
  }

  /// Uniform over vertices with an all-zero second register.
  [[nodiscard]] std::vector<std::complex<double>> blank_state() const;

  /// XORs x_{i_m} into slot m for the elements i_1 < ... < i_r of S (r queries).
  void apply_setup_query(std::vector<std::complex<double>>& state) const;
  /// XORs x_y into slot r+1 (one query).
  void apply_oracle(std::vector<std::complex<double>>& state) const;
  void apply_alpha(std::vector<std::complex<double>>& state) const;
  void apply_beta_ext(std::vector<std::complex<double>>& state) const;
  void apply_phase_flip(std::vector<std::complex<double>>& state) const;

  /// Number of terms with |amplitude| > threshold whose slots 1..r do not hold
  /// the values of S in order, or whose slot r+1 differs from x_y (or from 0
  /// when `last_slot_holds_y` is false).
  [[nodiscard]] std::size_t correspondence_violations(
      const std::vector<std::complex<double>>& state, bool last_slot_holds_y,
      double threshold = 1e-12) const;

  /// Probability of each vertex after tracing out the second register.
  [[nodiscard]] std::vector<double> first_register_marginal(
      const std::vector<std::complex<double>>& state) const;

 private:
  void permute(std::vector<std::complex<double>>& state,
               const std::vector<std::size_t>& target) const;

  ProblemParams params_;
  const KDistinctnessInstance* instance_;
  VertexTable table_;
  std::size_t alphabet_;
  std::size_t codes_;  // alphabet^(r+1)
  Partition alpha_ext_;
  Partition beta_ext_;
  std::vector<std::size_t> oracle_target_;
  std::vector<std::size_t> setup_target_;
  std::vector<std::uint8_t> marked_;
};

struct TwoRegisterResult {
  std::vector<std::complex<double>> state;
  std::vector<double> marginal;
  double marked_probability = 0;
  std::size_t setup_violations = 0;   // after the initial query round
  std::size_t oracle_violations = 0;  // after step 2 of each subroutine call
  std::size_t beta_violations = 0;    // after step 3
  std::size_t restore_violations = 0; // after step 4 (slot r+1 back to 0)
  std::size_t setup_queries = 0;
  std::size_t oracle_queries = 0;
};

/// Runs Initial Setup and t1 Main Block iterations of t2 subroutine calls on
/// both registers. Requires a unique k-colliding set and values in [1, M].
TwoRegisterResult run_two_register_microsim(const ProblemParams& params,
                                            const KDistinctnessInstance& instance, int t1,
                                            int t2, std::uint64_t cap = kDefaultStateCap);

}  // namespace kdistinct
