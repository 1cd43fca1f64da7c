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


#include "kdistinct/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"

using namespace kdistinct;

TEST(Config, JsonRoundTripAndHash) {
  ExperimentConfig c;
  c.n = 100;
  c.k = 3;
  c.r = 20;
  c.t1 = 4;
  c.mode = StepMode::exact;
  c.ladder = {100, 1000};
  c.seed = 77;
  c.skip = {"full"};
  c.values = {1, 2, 1};
  c.tolerance = 1e-8;
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(c.hash().size(), 16u);
  auto d = c;
  d.seed = 78;
  EXPECT_NE(d.hash(), c.hash());
}

TEST(Config, UnknownModeRejected) {
  EXPECT_EQ(parse_step_mode("exact"), StepMode::exact);
  EXPECT_EQ(to_string(StepMode::closed), "closed");
  EXPECT_THROW(parse_step_mode("fancy"), std::invalid_argument);
}

TEST(Config, StepsFallBackToMode) {
  ExperimentConfig c;
  c.n = 10000;
  const auto p = c.params();
  EXPECT_EQ(p.r, 464);
  EXPECT_EQ(c.steps(p), (StepCounts{17, 24}));
  c.t2 = 30;
  EXPECT_EQ(c.steps(p).t2, 30);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Table, CsvLayout) {
  Table t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  EXPECT_EQ(t.to_csv(), "a,b\n1,2\n3,4\n");
  EXPECT_EQ(t.to_json().size(), 2u);
}

TEST(RegimeR, PicksLargestValid) {
  EXPECT_EQ(regime_r(8, 2), 4);
  EXPECT_EQ(regime_r(5, 2), 2);
  EXPECT_EQ(regime_r(8, 3), 4);
  EXPECT_THROW(regime_r(4, 2), RegimeError);
}

TEST(Report, FlagsAndDeterminism) {
  ExperimentConfig c;
  c.n = 10000;
  const auto a = params_report(c).dump();
  const auto b = params_report(c).dump();
  EXPECT_EQ(a, b);
  const auto j = params_report(c);
  EXPECT_EQ(j["r"], 464);
  EXPECT_TRUE(j["flags"]["k_at_most_r"].get<bool>());
  EXPECT_TRUE(j["flags"]["asymptotic_gate_r_ge_100"].get<bool>());
  c.n = 10;
  c.k = 8;
  EXPECT_THROW(params_report(c), RegimeError);
}

TEST(Sweeps, DegenerateRanges) {
  const auto p = ProblemParams::make(1000, 2);
  const auto one = sweep_t2(p, 5, 5, 10);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.argmax_t2, 5);
  const auto t1 = sweep_t1(p, 5, 3, 3);
  ASSERT_EQ(t1.rows.size(), 1u);
  EXPECT_TRUE(sweep_t2(p, 6, 5, 10).rows.empty());
}

TEST(Sweeps, FirstPeakPrecedesLaterLobes) {
  const auto p = ProblemParams::make(10000, 2);
  const auto res = sweep_t1(p, 24, 0, 68);
  EXPECT_EQ(res.first_peak_t1, 17);
  const auto& rows = res.rows;
  EXPECT_GT(rows[17].p, rows[16].p);
  EXPECT_GT(rows[17].p, rows[18].p);
}

TEST(Convergence, EmptyLadderAndMonotoneGap) {
  const auto empty = convergence(2, {}, StepMode::exact);
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_EQ(empty.fitted_constant, 0.0);
  const auto res = convergence(2, {10000, 100000, 1000000}, StepMode::exact);
  ASSERT_EQ(res.rows.size(), 3u);
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    EXPECT_GT(res.rows[i].p_exact, res.rows[i - 1].p_exact);
  EXPECT_NEAR(res.theory_constant, asymptotic_gap_constant(2), 1e-15);
}

TEST(Verify, AllChecksPassByDefault) {
  const auto checks = run_verification({});
  EXPECT_GE(checks.size(), 9u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Verify, ImpossibleToleranceFails) {
  VerifyOptions o;
  o.tolerance = 1e-30;
  o.skip = {"full", "microsim"};
  const auto checks = run_verification(o);
  EXPECT_TRUE(std::any_of(checks.begin(), checks.end(), [](auto& c) { return !c.passed; }));
}

TEST(Verify, SkipRemovesGroup) {
  VerifyOptions o;
  o.skip = {"full"};
  for (const auto& c : run_verification(o)) EXPECT_NE(c.name, "reduced-vs-full");
}

TEST(Sample, DeterministicAndEmpty) {
  const auto p = ProblemParams::make(8, 2);
  const auto inst = KDistinctnessInstance::random_unique(8, 2, 8, 1);
  const auto a = sample_run(p, inst, {2, 2}, 5000, 9);
  const auto b = sample_run(p, inst, {2, 2}, 5000, 9);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_NEAR(a.exact_probability, 0.532237714285714, 1e-12);
  EXPECT_TRUE(a.within_3_sigma);
  const auto z = sample_run(p, inst, {2, 2}, 0, 9);
  EXPECT_EQ(z.successes, 0);
  EXPECT_EQ(z.samples, 0);
}

TEST(Deviation, ReducedAndFullAgree) {
  const auto p = ProblemParams::make(8, 3, 4);
  const auto inst = KDistinctnessInstance::random_unique(8, 3, 8, 2);
  EXPECT_LT(reduced_full_max_deviation(p, inst, 3, 2), 1e-10);
}
