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


#include "kdistinct/reduced_model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"

using namespace kdistinct;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct restatement of the two reflections, entry by entry.
Eigen::MatrixXd oracle_u_alpha(int n, int k, int r) {
  const int d = 2 * k + 1;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d, d);
  for (int ell = 0; ell <= k; ++ell) {
    const double p = static_cast<double>(k - ell) / (n - r);
    const int a = 2 * ell;
    if (ell == k) {
      u(a, a) = 1.0;
      continue;
    }
    u(a, a) = 1 - 2 * p;
    u(a + 1, a + 1) = -(1 - 2 * p);
    u(a, a + 1) = u(a + 1, a) = 2 * std::sqrt(p * (1 - p));
  }
  return u;
}

Eigen::MatrixXd oracle_u_beta(int k, int r) {
  const int d = 2 * k + 1;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d, d);
  // Pairs (ell,0) <-> (ell-1,1) share the union S u {y} with ell marked indices.
  for (int ell = 0; ell <= k; ++ell) {
    const double p = static_cast<double>(ell) / (r + 1);
    const int zero = 2 * ell;
    if (ell == 0) {
      u(zero, zero) = 1.0;
      continue;
    }
    const int one = 2 * (ell - 1) + 1;
    u(zero, zero) = 1 - 2 * p;
    u(one, one) = -(1 - 2 * p);
    u(zero, one) = u(one, zero) = 2 * std::sqrt(p * (1 - p));
  }
  return u;
}

double closed_cos(int n, int r, int m) {
  return 1.0 - 2.0 * m * (n - m + 1) / ((r + 1.0) * (n - r));
}

double p_from_eigen(const ProblemParams& p, int t1, int t2) {
  const auto w = build_reduced_walk(p);
  Eigen::MatrixXd g = w.reflect;
  for (int i = 0; i < t2; ++i) g = w.step * g;
  Eigen::VectorXd v = initial_reduced_state(p).amplitudes.real();
  for (int i = 0; i < t1; ++i) v = g * v;
  return v(2 * p.k) * v(2 * p.k);
}

}  // namespace

TEST(ReducedWalk, EntriesMatchOracle) {
  for (int n = 6; n <= 30; ++n) {
    for (int k = 2; k <= 4; ++k) {
      for (int r = k; r < n - k; r += 3) {
        const auto p = ProblemParams::make(n, k, r);
        const auto w = build_reduced_walk(p);
        ASSERT_LT((w.u_alpha - oracle_u_alpha(n, k, r)).cwiseAbs().maxCoeff(), 1e-15);
        ASSERT_LT((w.u_beta - oracle_u_beta(k, r)).cwiseAbs().maxCoeff(), 1e-15);
        ASSERT_LT((w.step - w.u_beta * w.u_alpha).cwiseAbs().maxCoeff(), 1e-15);
      }
    }
  }
}

TEST(ReducedWalk, ReflectionsAreSymmetricInvolutions) {
  for (int n : {8, 20, 100, 10000}) {
    for (int k = 2; k <= 4; ++k) {
      const auto p = ProblemParams::make(n, k);
      if (!p.reduced_regime()) continue;
      const auto w = build_reduced_walk(p);
      const auto id = Eigen::MatrixXd::Identity(p.dimension(), p.dimension());
      for (const auto* m : {&w.u_alpha, &w.u_beta, &w.reflect}) {
        EXPECT_LT(((*m) * (*m) - id).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(((*m) - m->transpose()).cwiseAbs().maxCoeff(), 0.0 + 1e-15);
      }
      EXPECT_LT((w.step * w.step.transpose() - id).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ReducedWalk, OutOfRegimeThrows) {
  EXPECT_THROW(build_reduced_walk(ProblemParams::make(10, 8)), RegimeError);
  EXPECT_THROW(build_reduced_walk(ProblemParams::make(5, 2, 3)), RegimeError);
  EXPECT_THROW(success_probability(ProblemParams::make(5, 2, 1), 1, 1), RegimeError);
}

TEST(InitialState, ClassWeightsN8) {
  const auto p = ProblemParams::make(8, 2);
  const auto s = initial_reduced_state(p);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::norm(s[{2, 0}]), 60.0 / 280.0, 1e-15);
  EXPECT_NEAR(std::norm(s[{0, 0}]), 30.0 / 280.0, 1e-15);
  EXPECT_NEAR(std::norm(s[{0, 1}]), 30.0 / 280.0, 1e-15);
  EXPECT_NEAR(std::norm(s[{1, 0}]), 120.0 / 280.0, 1e-15);
  EXPECT_NEAR(std::norm(s[{1, 1}]), 40.0 / 280.0, 1e-15);
}

TEST(InitialState, NormalizedForLargeN) {
  for (int n : {1000, 100000, 1000000}) {
    for (int k = 2; k <= 4; ++k) {
      const auto p = ProblemParams::make(n, k);
      const auto s = initial_reduced_state(p);
      EXPECT_NEAR(s.norm(), 1.0, 1e-14);
      EXPECT_NEAR(std::log(std::norm(s[{k, 0}])),
                  log_eta_cardinality(p, {k, 0}) - log_vertex_count(p), 1e-8);
    }
  }
}

TEST(StepParameters, ClosedExamples) {
  EXPECT_EQ(step_parameters(ProblemParams::make(8, 2), StepMode::closed), (StepCounts{2, 2}));
  EXPECT_EQ(step_parameters(ProblemParams::make(10000, 2), StepMode::closed),
            (StepCounts{17, 24}));
}

TEST(StepParameters, ExactT2FromLargestPhase) {
  const auto p = ProblemParams::make(8, 2);
  EXPECT_EQ(step_parameters(p, StepMode::exact).t2, 2);
  for (int n : {100, 10000, 1000000}) {
    const auto q = ProblemParams::make(n, 2);
    const double phi_k = std::acos(closed_cos(n, q.r, 2));
    EXPECT_EQ(step_parameters(q, StepMode::exact).t2, static_cast<int>(std::lround(kPi / phi_k)));
  }
}

TEST(Evolution, ZeroStepsAndIdentities) {
  const auto p = ProblemParams::make(8, 2);
  EXPECT_NEAR(success_probability(p, 0, 5), 60.0 / 280.0, 1e-15);
  // t2 = 0 leaves only R, which does not change probabilities.
  EXPECT_NEAR(success_probability(p, 7, 0), 60.0 / 280.0, 1e-15);
  EXPECT_NEAR(success_probability(p, 2, 2), 0.532237714285714, 1e-12);
  const auto w = build_reduced_walk(p);
  const auto s = initial_reduced_state(p);
  EXPECT_NEAR(evolve_reduced(w, s, 5, 3).norm(), 1.0, 1e-13);
  EXPECT_THROW(success_probability(p, -1, 2), std::invalid_argument);
}

TEST(Evolution, MatchesDenseMatrixPowers) {
  for (int n : {8, 12, 50, 400}) {
    for (int k = 2; k <= 3; ++k) {
      const auto p = ProblemParams::make(n, k);
      if (!p.reduced_regime()) continue;
      for (int t2 = 0; t2 <= 6; ++t2) {
        for (int t1 = 0; t1 <= 6; ++t1) {
          ASSERT_NEAR(success_probability(p, t1, t2), p_from_eigen(p, t1, t2), 1e-12);
        }
      }
    }
  }
}

TEST(Evolution, TrajectoryMatchesPointwise) {
  const auto p = ProblemParams::make(2000, 3);
  const auto traj = success_trajectory(p, 9, 40);
  ASSERT_EQ(traj.size(), 41u);
  for (int t1 = 0; t1 <= 40; t1 += 7) EXPECT_NEAR(traj[t1], success_probability(p, t1, 9), 1e-12);
}

TEST(Spectrum, ClosedFormMatchesEigenSolver) {
  for (int n = 6; n <= 500; n += 7) {
    for (int k = 2; k <= 4; ++k) {
      const auto p = ProblemParams::make(n, k);
      if (!p.reduced_regime()) continue;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(build_reduced_walk(p).step.cast<Complex>());
      std::vector<double> positive;
      int ones = 0;
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double a = std::arg(es.eigenvalues()(i));
        ASSERT_NEAR(std::abs(es.eigenvalues()(i)), 1.0, 1e-12);
        if (std::abs(a) < 1e-7) ++ones;
        else if (a > 0) positive.push_back(a);
      }
      std::sort(positive.begin(), positive.end());
      ASSERT_EQ(ones, 1) << "N=" << n << " k=" << k;
      const auto phis = eigenphases(p);
      ASSERT_EQ(positive.size(), phis.size());
      for (std::size_t i = 0; i < phis.size(); ++i) {
        ASSERT_NEAR(std::cos(phis[i]), closed_cos(n, p.r, static_cast<int>(i) + 1), 1e-12);
        ASSERT_NEAR(positive[i], phis[i], 1e-9) << "N=" << n << " k=" << k;
      }
    }
  }
}

TEST(Spectrum, OverlapsMatchNumericalAndAreComplete) {
  for (int n : {8, 9, 20, 77, 300}) {
    for (int k = 2; k <= 3; ++k) {
      const auto p = ProblemParams::make(n, k);
      if (!p.reduced_regime()) continue;
      const auto closed = overlaps_k0(p);
      const auto num = numerical_spectrum(p);
      EXPECT_LT(num.max_residual, 1e-10);
      ASSERT_EQ(closed.size(), static_cast<std::size_t>(k + 1));
      double total = closed[0] * closed[0];
      for (int i = 1; i <= k; ++i) total += 2 * closed[i] * closed[i];
      EXPECT_NEAR(total, 1.0, 1e-10);
      for (int i = 0; i <= k; ++i) EXPECT_NEAR(closed[i], num.overlaps[i], 1e-9);
    }
  }
}

TEST(Spectrum, N8K2Values) {
  const auto p = ProblemParams::make(8, 2);
  const auto phis = eigenphases(p);
  EXPECT_NEAR(std::cos(phis[0]), 0.2, 1e-15);
  EXPECT_NEAR(std::cos(phis[1]), -0.4, 1e-15);
  const auto ov = overlaps_k0(p);
  EXPECT_NEAR(ov[0], std::sqrt(60.0 / 280.0), 1e-12);
  EXPECT_NEAR(ov[1], 0.5, 1e-12);
  EXPECT_NEAR(ov[2], std::sqrt(1.0 / 7.0), 1e-12);
  // b at t2 = 2 straight from the defining sum.
  double b = 0;
  for (int i = 0; i < 2; ++i) b += ov[i + 1] * ov[i + 1] / (1 - std::cos(2 * phis[i]));
  EXPECT_NEAR(principal_phase_lambda(p, 2).b, b, 1e-14);
}

TEST(PrincipalPhase, ClosedNearNumericAtLargeN) {
  const auto p = ProblemParams::make(10000, 2);
  const auto pp = principal_phase_lambda(p, 24);
  EXPECT_NEAR(pp.lambda / pp.lambda_numeric, 1.0, 0.05);
  EXPECT_GT(pp.k0_overlap_numeric, 0.0);
}

TEST(PrincipalPhase, SinusoidalPrediction) {
  // p(t1) ~ sin^2((2 t1 + 1) lambda) times the principal overlap weight.
  const auto p = ProblemParams::make(10000, 2);
  const auto sd = spectral_data(p);
  const int t2 = sd.exact.t2;
  const auto pp = principal_phase_lambda(p, t2);
  const double amp = 4 * std::norm(pp.psi0_overlap_numeric) * pp.k0_overlap_numeric *
                     pp.k0_overlap_numeric;
  const auto traj = success_trajectory(p, t2, 3 * sd.exact.t1);
  double worst = 0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const double s = std::sin(t * pp.lambda_numeric);
    worst = std::max(worst, std::abs(traj[t] - amp * s * s));
  }
  EXPECT_LT(worst, 10.0 / std::sqrt(p.r));
}

TEST(PrincipalPhase, AssumptionRatioShrinksWithN) {
  double prev = 1e9;
  for (int n : {1000, 10000, 100000, 1000000}) {
    const auto sd = spectral_data(ProblemParams::make(n, 2));
    EXPECT_LT(sd.assumption_ratio, prev);
    prev = sd.assumption_ratio;
  }
  EXPECT_LT(prev, 0.2);
}

TEST(PrincipalPhase, DegenerateDenominatorThrows) {
  // t2 phi_n a multiple of 2 pi zeroes a denominator.
  EXPECT_THROW(principal_phase_lambda(ProblemParams::make(8, 2), 0), std::domain_error);
}

TEST(Asymptotics, Values) {
  const double c2 = 2 / std::pow(std::tan(kPi / 2 * std::sqrt(0.5)), 2);
  EXPECT_NEAR(asymptotic_gap_constant(2), c2, 1e-14);
  const auto p = ProblemParams::make(1000000, 2);
  EXPECT_NEAR(asymptotic_success(p), 1 - c2 / std::sqrt(p.r), 1e-14);
  EXPECT_GE(asymptotic_success(ProblemParams::make(8, 4, 2)), 0.0);
}

TEST(Asymptotics, ExactSuccessApproachesLimit) {
  double prev_gap = 1.0;
  for (int n : {10000, 100000, 1000000}) {
    const auto p = ProblemParams::make(n, 2);
    const auto st = step_parameters(p, StepMode::exact);
    const double gap = 1 - success_probability(p, st.t1, st.t2);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
}
