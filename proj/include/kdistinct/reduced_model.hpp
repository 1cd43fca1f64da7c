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
#include <vector>

#include <Eigen/Dense>

#include "kdistinct/combinatorics.hpp"

namespace kdistinct {

using Complex = std::complex<double>;

/// Amplitudes over the class basis |ell, j> in EtaClassIndex::flat() order.
struct ReducedState {
  Eigen::VectorXcd amplitudes;

  [[nodiscard]] int dimension() const { return static_cast<int>(amplitudes.size()); }
  [[nodiscard]] double norm() const { return amplitudes.norm(); }
  [[nodiscard]] Complex operator[](EtaClassIndex idx) const { return amplitudes(idx.flat()); }
};

/// The walk restricted to the invariant (2k+1)-dimensional subspace.
/// `step` is u = u_beta * u_alpha (u_alpha acts first).
struct ReducedWalk {
  Eigen::MatrixXd u_alpha;
  Eigen::MatrixXd u_beta;
  Eigen::MatrixXd reflect;  // R = I - 2|k,0><k,0|
  Eigen::MatrixXd step;
};

ReducedWalk build_reduced_walk(const ProblemParams& params);

/// Class-weighted uniform state: amplitude sqrt(|eta| / |V|).
ReducedState initial_reduced_state(const ProblemParams& params);

struct StepCounts {
  int t1 = 0;
  int t2 = 0;
  bool operator==(const StepCounts&) const = default;
};

enum class StepMode { closed, exact };

/// closed: (round(pi sqrt(r) / 4), round(pi sqrt(r) / (2 sqrt(k)))).
/// exact:  t2 = round(pi / phi_k), t1 = round(pi / (2 lambda)) with lambda the
///         numerically diagonalized principal phase of u^t2 R.
StepCounts step_parameters(const ProblemParams& params, StepMode mode);

/// ((u^t2) R)^t1 |state>.
ReducedState evolve_reduced(const ReducedWalk& walk, const ReducedState& state, int t1, int t2);

/// |<k,0| (u^t2 R)^t1 |psi_0>|^2.
double success_probability(const ProblemParams& params, int t1, int t2);

/// p(0), p(1), ..., p(t1_max) at fixed t2, computed in one pass.
std::vector<double> success_trajectory(const ProblemParams& params, int t2, int t1_max);

/// phi_1 < ... < phi_k from cos phi_n = 1 - 2n(N-n+1)/((r+1)(N-r)).
/// Throws RegimeError if a cosine leaves [-1, 1].
std::vector<double> eigenphases(const ProblemParams& params);

/// <k,0|psi_n> for n = 0..k, closed forms, all positive.
std::vector<double> overlaps_k0(const ProblemParams& params);

/// Principal phase of u^t2 R, both from the small-lambda expansion and from
/// direct diagonalization.
struct PrincipalPhase {
  double lambda = 0;  // <k,0|psi_0> / sqrt(b)
  double b = 0;       // sum_n <k,0|psi_n>^2 / (1 - cos(t2 phi_n))
  double lambda_numeric = 0;
  double k0_overlap_numeric = 0;        // <k,0|lambda>, phase fixed so it is > 0
  Complex psi0_overlap_numeric{0, 0};   // <psi_0|lambda>
};

/// Throws std::domain_error when some 1 - cos(t2 phi_n) < 1e-14.
PrincipalPhase principal_phase_lambda(const ProblemParams& params, int t2);

/// 1 - (k / r^(1/k)) cot^2((pi/2) sqrt((k-1)/k)), clamped to [0, 1].
double asymptotic_success(const ProblemParams& params);

/// Constant k cot^2((pi/2) sqrt((k-1)/k)) multiplying r^(-1/k) in the gap.
double asymptotic_gap_constant(int k);

/// Everything the closed forms predict for one instance.
struct SpectralData {
  std::vector<double> phis;
  std::vector<double> overlaps;
  double lambda = 0;
  double lambda_numeric = 0;
  double b = 0;
  StepCounts closed;
  StepCounts exact;
  double p_succ_predicted = 0;  // 1 / (4b) at the exact t2
  double assumption_ratio = 0;  // lambda / (t2 phi_1) at the exact t2
};

SpectralData spectral_data(const ProblemParams& params);

/// Numerical eigen-decomposition of u, for validating the closed forms.
struct NumericalSpectrum {
  std::vector<Complex> eigenvalues;  // all 2k+1
  std::vector<double> phis;          // positive eigenphases, ascending (k of them)
  std::vector<double> overlaps;      // |<k,0|psi_n>| for n = 0..k, matched to phis
  double max_residual = 0;           // max ||u v - mu v||
};

NumericalSpectrum numerical_spectrum(const ProblemParams& params);

}  // namespace kdistinct
