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

#include <cmath>

#include "gtest/gtest.h"

using namespace kdistinct;

namespace {

using C = std::complex<double>;

double l2_gap(const std::vector<C>& a, const std::vector<C>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(TwoRegister, MarginalMatchesFirstRegisterWalk) {
  const auto p = ProblemParams::make(5, 2, 3, 4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = KDistinctnessInstance::random_unique(5, 2, 4, seed);
    for (int t1 : {1, 2, 3}) {
      for (int t2 : {1, 2}) {
        const auto res = run_two_register_microsim(p, inst, t1, t2);
        const auto full = run_full_algorithm(p, inst, t1, t2);
        ASSERT_EQ(res.marginal.size(), full.state.size());
        for (std::size_t v = 0; v < full.state.size(); ++v)
          ASSERT_NEAR(res.marginal[v], std::norm(full.state.amplitudes[v]), 1e-10);
        ASSERT_NEAR(res.marked_probability, full.marked_probability, 1e-10);
        EXPECT_EQ(res.setup_violations, 0u);
        EXPECT_EQ(res.oracle_violations, 0u);
        EXPECT_EQ(res.beta_violations, 0u);
        EXPECT_EQ(res.restore_violations, 0u);
        EXPECT_EQ(res.setup_queries, 3u);
        EXPECT_EQ(res.oracle_queries, static_cast<std::size_t>(2 * t1 * t2));
      }
    }
  }
}

TEST(TwoRegister, SmallRegimeInstance) {
  const auto p = ProblemParams::make(6, 2, 2, 5);
  const auto inst = KDistinctnessInstance::random_unique(6, 2, 5, 3);
  const auto res = run_two_register_microsim(p, inst, 2, 2);
  EXPECT_NEAR(res.marked_probability, success_probability(p, 2, 2), 1e-10);
}

TEST(TwoRegister, SetupWritesListValues) {
  const auto p = ProblemParams::make(5, 2, 3, 4);
  const auto inst = KDistinctnessInstance::from_values({2, 4, 2, 1, 3}, 2);
  TwoRegisterSimulator sim(p, inst);
  EXPECT_EQ(sim.alphabet_size(), 8u);
  auto s = sim.blank_state();
  EXPECT_EQ(sim.correspondence_violations(s, false), sim.table().size());
  sim.apply_setup_query(s);
  EXPECT_EQ(sim.correspondence_violations(s, false), 0u);
  // Spot check: vertex ({1,2,4}, 5) holds 2, 4, 1, then 0.
  const auto v = sim.table().index_of({{1, 2, 4}, 5});
  const std::vector<std::size_t> slots{2, 4, 1, 0};
  EXPECT_NEAR(std::abs(s[sim.joint_index(v, sim.encode(slots))]), 1 / std::sqrt(20.0), 1e-15);
  EXPECT_EQ(sim.decode(sim.encode(slots)), slots);
}

TEST(TwoRegister, OracleIsInvolution) {
  const auto p = ProblemParams::make(5, 2, 3, 4);
  const auto inst = KDistinctnessInstance::from_values({2, 4, 2, 1, 3}, 2);
  TwoRegisterSimulator sim(p, inst);
  auto s = sim.blank_state();
  sim.apply_setup_query(s);
  const auto before = s;
  sim.apply_oracle(s);
  EXPECT_EQ(sim.correspondence_violations(s, true), 0u);
  EXPECT_GT(l2_gap(s, before), 0.5);
  sim.apply_oracle(s);
  EXPECT_EQ(l2_gap(s, before), 0.0);
}

TEST(TwoRegister, BetaExtPreservesCorrespondence) {
  const auto p = ProblemParams::make(5, 2, 3, 4);
  const auto inst = KDistinctnessInstance::from_values({2, 4, 2, 1, 3}, 2);
  TwoRegisterSimulator sim(p, inst);
  auto s = sim.blank_state();
  sim.apply_setup_query(s);
  sim.apply_phase_flip(s);
  sim.apply_alpha(s);
  sim.apply_oracle(s);
  sim.apply_beta_ext(s);
  EXPECT_EQ(sim.correspondence_violations(s, true), 0u);
  sim.apply_oracle(s);
  EXPECT_EQ(sim.correspondence_violations(s, false), 0u);
  double total = 0;
  for (double m : sim.first_register_marginal(s)) total += m;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(TwoRegister, RejectsBadInput) {
  const auto p = ProblemParams::make(5, 2, 3, 4);
  EXPECT_THROW(TwoRegisterSimulator(p, KDistinctnessInstance::from_values({1, 5, 1, 2, 3}, 2)),
               std::invalid_argument);
  EXPECT_THROW(TwoRegisterSimulator(p, KDistinctnessInstance::from_values({1, 0, 1, 2, 3}, 2)),
               std::invalid_argument);
  EXPECT_THROW(TwoRegisterSimulator(p, KDistinctnessInstance::from_values({1, 1, 2}, 2)),
               std::invalid_argument);
  const auto inst = KDistinctnessInstance::random_unique(5, 2, 4, 0);
  EXPECT_THROW(TwoRegisterSimulator(p, inst, 100), CapExceeded);
  EXPECT_THROW(run_two_register_microsim(p, inst, -1, 1), std::invalid_argument);
}
